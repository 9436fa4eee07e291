#include <doctest.h>

#include <cmath>
#include <limits>

#include "gpt/estimators.hpp"
#include "gpt/rng.hpp"
#include "gpt/swaps.hpp"

using namespace gpt;

namespace {

ChainTrace plain_trace(int n, RandomStream& rng) {
  ChainTrace t;
  t.algorithm = "rwm";
  for (int i = 0; i < n; ++i) {
    ParamVector x(2);
    x << rng.normal(), rng.uniform();
    t.samples.push_back(x);
  }
  return t;
}

ChainTrace weighted_trace(int n, int K, const TemperatureLadder& ladder, bool flat, RandomStream& rng) {
  ChainTrace t;
  t.algorithm = "wgpt";
  t.perms = std::make_shared<const PermutationSet>(PermutationSet::full(K));
  for (int i = 0; i < n; ++i) {
    std::vector<ChainState> c;
    for (int k = 0; k < K; ++k) {
      ParamVector x(2);
      x << rng.normal(), rng.normal();
      c.push_back(ChainState{x, flat ? 1.0 : 3.0 * rng.uniform(), 0.0});
    }
    Ensemble e(std::move(c));
    t.weighted.push_back(WeightedSample{e, is_weights(e, ladder, *t.perms)});
  }
  return t;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("burn-in discards floor(burn_frac * N)") {
  CHECK(burn_in_count(25000, 0.2) == 5000);
  CHECK(burn_in_count(10, 0.25) == 2);
  CHECK(burn_in_count(10, 0.0) == 0);
  CHECK_THROWS_AS(burn_in_count(10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(burn_in_count(10, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(burn_in_count(0, 0.2), std::invalid_argument);
}

TEST_CASE("ergodic estimate is the post-burn-in sample mean") {
  ChainTrace t;
  for (int i = 1; i <= 10; ++i) t.samples.push_back(ParamVector::Constant(1, i));
  const QoiFn id = [](const ParamVector& x) { return x[0]; };
  CHECK(ergodic_estimate(t, id, 0.2) == doctest::Approx(6.5));  // mean of 3..10
  CHECK(estimate(t, id, 0.0) == doctest::Approx(5.5));
}

TEST_CASE("estimators are linear in the quantity of interest") {
  RandomStream rng(9);
  const auto ladder = build_ladder(4.0, 3);
  const QoiFn f = [](const ParamVector& x) { return x[0]; };
  const QoiFn g = [](const ParamVector& x) { return x[1] * x[1]; };
  const QoiFn h = [&](const ParamVector& x) { return 2.5 * f(x) - 0.75 * g(x); };
  for (const auto& t : {plain_trace(500, rng), weighted_trace(300, 3, ladder, false, rng)}) {
    CHECK(estimate(t, h, 0.2) ==
          doctest::Approx(2.5 * estimate(t, f, 0.2) - 0.75 * estimate(t, g, 0.2)).epsilon(1e-12));
  }
}

TEST_CASE("chain weights group the importance weights by first position") {
  RandomStream rng(10);
  const auto ladder = build_ladder(4.0, 3);
  const auto t = weighted_trace(5, 3, ladder, false, rng);
  for (const auto& s : t.weighted) {
    const auto W = chain_weights(s, *t.perms);
    std::vector<double> direct(3, 0.0);
    for (std::size_t i = 0; i < t.perms->size(); ++i) direct[static_cast<std::size_t>((*t.perms)[i](0))] += s.weights[i];
    double total = 0;
    for (int k = 0; k < 3; ++k) {
      CHECK(W[static_cast<std::size_t>(k)] == doctest::Approx(direct[static_cast<std::size_t>(k)]));
      total += W[static_cast<std::size_t>(k)];
    }
    CHECK(total == doctest::Approx(6.0));  // sum of w_hat over S_3 is |S|
  }
}

TEST_CASE("equal potentials give uniform weights and the all-chain average") {
  RandomStream rng(12);
  const auto ladder = build_ladder(4.0, 3);
  const auto t = weighted_trace(200, 3, ladder, true, rng);
  const QoiFn f = [](const ParamVector& x) { return x[0]; };
  double direct = 0;
  const std::size_t b = burn_in_count(t.size(), 0.2);
  for (std::size_t n = b; n < t.size(); ++n)
    for (int k = 0; k < 3; ++k) direct += t.weighted[n].ensemble.state(k)[0];
  direct /= 3.0 * static_cast<double>(t.size() - b);
  CHECK(weighted_estimate(t, f, 0.2) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("aggregate statistics and the MSE decomposition") {
  const std::vector<double> two{1.0, 3.0};
  const auto a = aggregate_runs(two, 1.0);
  CHECK(a.mean == 2.0);
  CHECK(a.variance == 2.0);
  CHECK(a.pop_variance == 1.0);
  CHECK(a.bias == 1.0);
  CHECK(a.mse == 2.0);
  CHECK(a.error() == 2.0);

  RandomStream rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 37; ++i) xs.push_back(0.3 + 0.1 * rng.normal());
  const auto b = aggregate_runs(xs, 0.31);
  CHECK(b.mse == doctest::Approx(b.pop_variance + b.bias * b.bias).epsilon(1e-12));
  const auto c = aggregate_runs(xs, std::nullopt);
  CHECK(c.error() == c.variance);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(aggregate_runs(one, 1.0), std::invalid_argument);
}

TEST_CASE("error ratios") {
  CHECK(error_ratio(0.004, 0.001) == doctest::Approx(4.0));
  CHECK(error_ratio(0.004, 0.004) == 1.0);
  CHECK(std::isinf(error_ratio(1.0, 0.0)));
  CHECK(std::isnan(error_ratio(0.0, 0.0)));
}

}
