#ifndef GPT_RNG_HPP
#define GPT_RNG_HPP

#include <cstdint>
#include <limits>

namespace gpt {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Reserved stream tags. Chain streams use the chain index (0..K-1).
enum class StreamTag : std::uint64_t {
  swap = 0xffff'0001ull,
  data = 0xffff'0002ull,
  init = 0xffff'0003ull,
};

/**
 * Counter-based random stream.
 *
 * The n-th draw of a stream is a pure function of (key, n), so a stream can be
 * reconstructed anywhere from its key alone. Keys are derived hierarchically
 * from (master seed, run, chain) with `derive`, which is what makes parallel
 * and serial execution produce identical chains.
 *
 * Satisfies UniformRandomBitGenerator. Normal deviates use Box-Muller rather
 * than std::normal_distribution, whose output is implementation-defined.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

  /// Stream for (seed, a, b): e.g. (master seed, run, chain).
  static RandomStream derive(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b = 0) noexcept;
  static RandomStream derive(std::uint64_t seed, std::uint64_t a,
                             StreamTag tag) noexcept {
    return derive(seed, a, static_cast<std::uint64_t>(tag));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return mix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
  }

  /// Uniform on the open interval (0, 1); never returns 0, so log(u) is finite.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gpt

#endif  // GPT_RNG_HPP
