#ifndef GPT_CORE_HPP
#define GPT_CORE_HPP

#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpt {

using ParamVector = Eigen::VectorXd;

/// Potential of a state outside the prior support. Log-density is -inf there.
inline constexpr double kOutOfDomain = std::numeric_limits<double>::infinity();

/// Default cap on K for enumerating the full symmetric group.
inline constexpr int kDefaultFullCap = 8;

/**
 * Inverse temperatures beta_k = 1/T_k with beta_1 = 1 > beta_2 > ... >= 0.
 * beta_K = 0 encodes T_K = infinity (that chain targets the prior).
 */
class TemperatureLadder {
 public:
  explicit TemperatureLadder(std::vector<double> betas);

  /// T_k = a^(k-1), k = 1..K.
  static TemperatureLadder geometric(double a, int K);
  static TemperatureLadder from_temperatures(const std::vector<double>& temps);

  int size() const { return static_cast<int>(betas_.size()); }
  double beta(int k) const { return betas_[static_cast<std::size_t>(k)]; }
  double temperature(int k) const;
  const std::vector<double>& betas() const { return betas_; }
  std::vector<double> temperatures() const;

 private:
  std::vector<double> betas_;
};

/// Same as TemperatureLadder::geometric; rejects a <= 1 or K < 2.
TemperatureLadder build_ladder(double a, int K);

/**
 * A bijection of {0..K-1}, stored as its forward map sigma(k).
 * One-based conversion helpers exist for configuration and reports.
 */
class Permutation {
 public:
  explicit Permutation(std::vector<int> map);

  static Permutation identity(int K);
  /// Transposition of (0-based) positions i and j.
  static Permutation transposition(int K, int i, int j);
  static Permutation from_one_based(const std::vector<int>& map);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int k) const { return map_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& map() const { return map_; }
  std::vector<int> one_based() const;

  Permutation inverse() const;
  /// (this o other)(k) = this(other(k)).
  Permutation compose(const Permutation& other) const;
  bool is_identity() const;

  std::string to_string() const;

  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<int> map_;
};

enum class PermScheme { full, adjacent_pairwise, adjacent_window, custom };

std::string to_string(PermScheme scheme);
PermScheme parse_perm_scheme(const std::string& name);

/**
 * An inversion-closed set of permutations of {0..K-1}, kept in lexicographic
 * order of the forward maps. Index order is the categorical order used by
 * every swap sampler.
 */
class PermutationSet {
 public:
  static PermutationSet full(int K, int cap = kDefaultFullCap);
  static PermutationSet adjacent_pairwise(int K);
  /// Identity plus every transposition (i, j) with |i - j| <= width.
  static PermutationSet adjacent_window(int K, int width);
  /// Validates: equal lengths, no duplicates, closed under inversion.
  static PermutationSet custom(std::vector<Permutation> perms);

  /// Copy without the identity (still inversion-closed). Throws if that empties the set.
  PermutationSet without_identity() const;

  PermScheme scheme() const { return scheme_; }
  int K() const { return k_; }
  std::size_t size() const { return perms_.size(); }
  const Permutation& operator[](std::size_t i) const { return perms_[i]; }
  auto begin() const { return perms_.begin(); }
  auto end() const { return perms_.end(); }

  std::optional<std::size_t> index_of(const Permutation& p) const;
  /// Index of the inverse of perms[i].
  std::size_t inverse_index(std::size_t i) const { return inverse_[i]; }
  /// True when closed under composition, i.e. a subgroup of S_K.
  bool is_group() const { return is_group_; }

 private:
  PermutationSet(int K, PermScheme scheme, std::vector<Permutation> perms);

  int k_ = 0;
  PermScheme scheme_ = PermScheme::custom;
  std::vector<Permutation> perms_;
  std::vector<std::size_t> inverse_;
  bool is_group_ = false;
};

PermutationSet enumerate_permutations(int K, PermScheme scheme, int window = 1,
                                      int full_cap = kDefaultFullCap);

/// One tempered chain: its state and the cached potential / log-prior there.
struct ChainState {
  ParamVector theta;
  double potential = 0.0;
  double log_prior = 0.0;
};

class TargetModel;

/**
 * Joint state (theta_1, ..., theta_K) with cached potentials Phi(theta_k) and
 * log-prior values. Immutable; every transformation returns a new ensemble.
 */
class Ensemble {
 public:
  explicit Ensemble(std::vector<ChainState> chains);

  /// Builds an ensemble evaluating potential and log-prior of every state.
  static Ensemble evaluate(std::vector<ParamVector> states, const TargetModel& target);

  int size() const { return static_cast<int>(chains_.size()); }
  const ChainState& chain(int k) const { return chains_[static_cast<std::size_t>(k)]; }
  const ParamVector& state(int k) const { return chain(k).theta; }
  double potential(int k) const { return chain(k).potential; }
  double log_prior(int k) const { return chain(k).log_prior; }
  const std::vector<ChainState>& chains() const { return chains_; }
  std::vector<double> potentials() const;

  /// True when every cached value matches a fresh evaluation exactly.
  bool is_coherent(const TargetModel& target) const;

 private:
  std::vector<ChainState> chains_;
};

/// result.state(k) = e.state(sigma(k)); caches move with their states.
Ensemble permute_ensemble(const Ensemble& e, const Permutation& sigma);

/// log pi_sigma(theta) = -sum_k beta_{sigma(k)} Phi(theta_k), normalizers omitted.
double log_joint_density(const Ensemble& e, const TemperatureLadder& ladder,
                         const Permutation& sigma);
double log_joint_density(const Ensemble& e, const TemperatureLadder& ladder);

/// log pi(theta_sigma) = -sum_k beta_k Phi(theta_{sigma(k)}).
double log_permuted_density(const Ensemble& e, const TemperatureLadder& ladder,
                            const Permutation& sigma);

/// -beta * phi with the convention 0 * inf = inf (out-of-domain stays out).
inline double tempered_log_density(double beta, double phi) {
  if (phi == kOutOfDomain) return -kOutOfDomain;
  return -beta * phi;
}

/// Max-shifted log(sum exp(x)). Returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// Normalized probabilities exp(x - log_sum_exp(x)).
std::vector<double> softmax(std::span<const double> x);

}  // namespace gpt

#endif  // GPT_CORE_HPP
