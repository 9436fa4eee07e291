#ifndef GPT_KERNELS_HPP
#define GPT_KERNELS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/rng.hpp"
#include "gpt/target.hpp"

namespace gpt {

enum class KernelKind { rwm, pcn };

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& name);

/**
 * Proposal of one base kernel. `scale` is the diagonal proposal factor in
 * problem units (empty means all ones); pCN ignores it and uses the prior's.
 */
struct KernelSpec {
  KernelKind kind = KernelKind::rwm;
  double step = 0.0;
  Eigen::VectorXd scale;

  static KernelSpec rwm(double step, Eigen::VectorXd scale = {});
  static KernelSpec pcn(double step);

  /// Throws std::invalid_argument on a bad step or a scale of the wrong size.
  void validate(int dim) const;
};

/// Per-temperature counters plus the model-evaluation count.
struct StepStats {
  std::vector<std::uint64_t> proposed;
  std::vector<std::uint64_t> accepted;
  std::uint64_t evaluations = 0;
  std::uint64_t swaps_proposed = 0;
  std::uint64_t swaps_accepted = 0;
  /// Temperature index whose dynamics each chain used in the latest product step.
  std::vector<int> last_dynamics;

  StepStats() = default;
  explicit StepStats(int K);

  double acceptance_rate(int k) const;
  void merge(const StepStats& other);
};

struct KernelResult {
  ChainState state;
  bool accepted = false;
  bool evaluated = false;
};

/**
 * log of the MH acceptance for a symmetric proposal at inverse temperature
 * beta: min{0, -beta (Phi* - Phi) + log_prior* - log_prior}, with off-domain
 * proposals mapped to -inf.
 */
double mh_log_acceptance(double beta, const ChainState& current, const ChainState& proposal);

/// Accepts iff log u < log_alpha with u ~ U(0,1); always consumes one draw.
bool metropolis_accept(double log_alpha, RandomStream& rng);

KernelResult rwm_step(const ChainState& current, double beta, const TargetModel& target,
                      const KernelSpec& spec, RandomStream& rng);

/// Prior-reversible proposal; the acceptance only involves the likelihood.
/// Throws std::invalid_argument if the target has no normal prior factor.
KernelResult pcn_step(const ChainState& current, double beta, const TargetModel& target,
                      const KernelSpec& spec, RandomStream& rng);

KernelResult kernel_step(const ChainState& current, double beta, const TargetModel& target,
                         const KernelSpec& spec, RandomStream& rng);

/// Evaluates a fresh state, charging one evaluation when it lies in the domain.
ChainState evaluate_state(ParamVector theta, const TargetModel& target, StepStats* stats);

/**
 * Advances every chain once and independently. Chain k uses spec and inverse
 * temperature of index sigma(k); sigma defaults to the identity. Chain k draws
 * only from rngs[k].
 */
Ensemble product_step(const Ensemble& e, const TemperatureLadder& ladder,
                      std::span<const KernelSpec> specs, const TargetModel& target,
                      std::span<RandomStream> rngs, StepStats* stats = nullptr,
                      const Permutation* sigma = nullptr);

}  // namespace gpt

#endif  // GPT_KERNELS_HPP
