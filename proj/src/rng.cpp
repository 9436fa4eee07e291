#include "gpt/rng.hpp"

#include <cmath>
#include <numbers>

namespace gpt {

RandomStream RandomStream::derive(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b) noexcept {
  std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ull);
  k = mix64(k ^ (a + 0x3c6ef372fe94f82bull));
  k = mix64(k ^ (b + 0xa54ff53a5f1d36f1ull));
  return RandomStream(k);
}

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace gpt
