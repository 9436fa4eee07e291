#include <doctest.h>

#include <cmath>
#include <set>

#include "gpt/rng.hpp"

using gpt::RandomStream;

TEST_SUITE("rng") {

TEST_CASE("mix64 matches the reference SplitMix64 output") {
  // First output of the reference generator seeded with 0.
  CHECK(gpt::mix64(0x9e3779b97f4a7c15ull) == 0xe220a8397b1dcdafull);
}

TEST_CASE("a stream is a pure function of its key") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(a.draws() == 100);

  RandomStream c(42);
  for (int i = 0; i < 50; ++i) c();
  RandomStream d(42);
  for (int i = 0; i < 50; ++i) d();
  CHECK(c.uniform() == d.uniform());
}

TEST_CASE("derived streams are distinct across runs, chains and tags") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t run = 0; run < 20; ++run) {
    for (std::uint64_t k = 0; k < 8; ++k) keys.insert(RandomStream::derive(7, run, k).key());
    keys.insert(RandomStream::derive(7, run, gpt::StreamTag::swap).key());
    keys.insert(RandomStream::derive(7, run, gpt::StreamTag::init).key());
  }
  CHECK(keys.size() == 20 * 10);
  CHECK(RandomStream::derive(1, 2, 3).key() == RandomStream::derive(1, 2, 3).key());
  CHECK(RandomStream::derive(1, 2, 3).key() != RandomStream::derive(2, 2, 3).key());
}

TEST_CASE("uniform and normal moments") {
  RandomStream r = RandomStream::derive(11, 0, 0);
  const int n = 200000;
  double su = 0, sz = 0, szz = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = r.normal();
    sz += z;
    szz += z * z;
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  // 5-sigma bands.
  CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sz / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(szz / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

}
