#ifndef GPT_VERIFY_HPP
#define GPT_VERIFY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpt/core.hpp"
#include "gpt/rng.hpp"
#include "gpt/target.hpp"

/**
 * Brute-force oracle on finite state spaces.
 *
 * Every transition matrix here is assembled by calling the same acceptance,
 * swap-ratio and weight functions the samplers use, one joint state at a time,
 * so a check on a matrix is a check on the sampler code.
 */
namespace gpt::verify {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultStateCap = 4096;

/// Potential on the points {0..m-1}; a state is a 1-vector holding the point index.
class DiscreteTarget final : public TargetModel {
 public:
  explicit DiscreteTarget(std::vector<double> potentials);

  std::string name() const override { return "discrete"; }
  int dim() const override { return 1; }
  bool in_domain(const ParamVector& theta) const override;
  double potential(const ParamVector& theta) const override;
  double log_prior(const ParamVector& theta) const override;
  ParamVector sample_prior(RandomStream& rng) const override;
  std::vector<Qoi> qois() const override;

  int points() const { return static_cast<int>(phi_.size()); }
  double phi(int i) const { return phi_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> phi_;
};

/**
 * Joint space {0..m-1}^K. Joint index = sum_k s_k m^(K-1-k), so chain 1 is the
 * most significant digit and Kronecker products compose in chain order.
 */
class DiscreteSpace {
 public:
  DiscreteSpace(std::vector<double> potentials, TemperatureLadder ladder, std::size_t cap = kDefaultStateCap);

  int points() const { return target_.points(); }
  int K() const { return ladder_.size(); }
  std::size_t size() const { return size_; }
  const TemperatureLadder& ladder() const { return ladder_; }
  const DiscreteTarget& target() const { return target_; }

  std::vector<int> tuple(std::size_t index) const;
  std::size_t index(std::span<const int> tuple) const;
  Ensemble ensemble(std::size_t index) const;
  std::size_t index_of(const Ensemble& e) const;

  /// Normalized exp(-beta_k Phi) over the points.
  Vector tempered(int k) const;
  /// Normalized mu_sigma(s) = prod_k pi_{sigma(k)}(s_k) over the joint space.
  Vector product_density(const Permutation& sigma) const;
  Vector mu() const;
  /// (1/|S|) sum_sigma mu_sigma.
  Vector mu_w(const PermutationSet& perms) const;

 private:
  DiscreteTarget target_;
  TemperatureLadder ladder_;
  std::size_t size_;
};

enum class BaseKind { walk, identity };

/**
 * Single-chain MH matrix at temperature index k. The walk proposes i-1 and
 * i+1 with probability 1/4 each; a proposal off the grid is a rejection.
 */
Matrix base_matrix(const DiscreteSpace& space, int k, BaseKind kind = BaseKind::walk);

/// Kronecker product where chain k moves with bases[sigma(k)] (identity sigma by default).
Matrix product_matrix(std::span<const Matrix> bases, const Permutation* sigma = nullptr);
Matrix product_matrix(const DiscreteSpace& space, BaseKind kind = BaseKind::walk, const Permutation* sigma = nullptr);

Matrix swap_matrix_uw(const DiscreteSpace& space, const PermutationSet& perms);
Matrix swap_matrix_pt_pair(const DiscreteSpace& space, int i, int j);
Matrix pt_sweep_matrix(const DiscreteSpace& space);
Matrix pt_sweep_down_matrix(const DiscreteSpace& space);
Matrix psdpt_swap_matrix(const DiscreteSpace& space);
Matrix ugpt_matrix(const DiscreteSpace& space, const PermutationSet& perms, BaseKind kind = BaseKind::walk);
Matrix rpt_matrix(const DiscreteSpace& space, int n_s = 1, BaseKind kind = BaseKind::walk);
/// Rows are sum_sigma w_sigma(s) times the rows of the swapped-dynamics product matrix.
Matrix wgpt_matrix(const DiscreteSpace& space, const PermutationSet& perms, BaseKind kind = BaseKind::walk);

/// max_i |sum_j P_ij - 1|.
double row_sum_error(const Matrix& p);
/// max_{i,j} |pi_i P_ij - pi_j P_ji|.
double check_reversibility(const Matrix& p, const Vector& pi);
/// ||pi P - pi||_1.
double check_invariance(const Vector& pi, const Matrix& p);
/// Unique stationary distribution; std::runtime_error if it is not unique.
Vector stationary(const Matrix& p);
/// Norm of P on the pi-mean-zero subspace of L2(pi) (pi must be invariant).
double l2_norm_mean_zero(const Matrix& p, const Vector& pi);
/// 1 - l2_norm_mean_zero for a pi-reversible P; rejects residual > 1e-10.
double spectral_gap(const Matrix& p, const Vector& pi);

/// sum_i min(a_i, b_i) ref_i, counting reference when `ref` is null.
double overlap(const Vector& a, const Vector& b, const Vector* ref = nullptr);
/// Minimum overlap between the joint densities mu_sigma, mu_rho over distinct pairs.
double min_pairwise_overlap(const DiscreteSpace& space, const PermutationSet& perms);

struct VarianceBoundResult {
  double lambda_m = 0.0;
  double bound = 0.0;        // lambda_m / (2 - lambda_m)
  double worst_slack = 0.0;  // min over f of (average variance - bound)
  double max_average = 0.0;  // max over f of the average variance
};

/// Average over S of Var_{mu_sigma}[f] for random f centred and normalized in L2(mu_W).
VarianceBoundResult variance_bound_check(const DiscreteSpace& space, const PermutationSet& perms, int trials,
                                         RandomStream& rng);

struct GapBoundResult {
  double lambda_m = 0.0;
  double gamma = 0.0;
  double norm_sq = 0.0;  // squared mean-zero norm of the weighted kernel
  double bound = 0.0;    // 1 - gamma lambda_m / (2 - lambda_m)
  double slack = 0.0;    // bound - norm_sq
};

GapBoundResult wgpt_gap_bound_check(const DiscreteSpace& space, const PermutationSet& perms,
                                    BaseKind kind = BaseKind::walk);

/**
 * |sum_s mu_W(s) (1/|S|) sum_sigma w_hat(s, sigma) q(s_{sigma(1)}) - E_mu[q(s_1)]|
 * with mu_W taken from stationary(wgpt_matrix).
 */
double weighted_estimator_error(const DiscreteSpace& space, const PermutationSet& perms, const Vector& q);

/// One walk step per chain; chain k uses inverse temperature of index sigma(k).
Ensemble discrete_product_step(const DiscreteSpace& space, const Ensemble& e, std::span<RandomStream> rngs,
                               const Permutation* sigma = nullptr);

struct SimulationCheck {
  std::size_t draws = 0;
  double max_z = 0.0;        // largest |freq - p| / sd over entries with p > 0
  bool support_ok = true;    // no visits to entries with p = 0
};

/// Runs the swap / walk / swap step `draws` times from `start` and compares with the ugpt matrix row.
SimulationCheck simulate_ugpt_row(const DiscreteSpace& space, const PermutationSet& perms, std::size_t start,
                                  std::size_t draws, std::uint64_t seed);

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = true;  // pass iff value <= threshold, else value >= threshold
  bool passed = false;
};

struct OracleOptions {
  std::uint64_t seed = 20240611;
  int instances = 24;
  int random_states = 10000;
  int variance_trials = 1000;
  std::size_t sim_draws = 1000000;
  std::size_t cap = kDefaultStateCap;
};

std::vector<CheckRow> run_oracle_suite(const OracleOptions& options = {});

}  // namespace gpt::verify

#endif  // GPT_VERIFY_HPP
