#ifndef GPT_SWAPS_HPP
#define GPT_SWAPS_HPP

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/kernels.hpp"
#include "gpt/rng.hpp"
#include "gpt/target.hpp"

namespace gpt {

/// Categorical distribution over a PermutationSet (or over PSDPT pairs).
struct SwapProbVector {
  std::vector<double> logits;
  std::vector<double> probs;

  static SwapProbVector from_logits(std::vector<double> logits);
};

/// Smallest index i with u < p_0 + ... + p_i; the last index absorbs round-off.
std::size_t sample_categorical(std::span<const double> probs, double u);

/// log r(theta, sigma) of a swapping ratio; -inf where the ratio vanishes.
using LogSwapRatio = std::function<double(const Ensemble&, const Permutation&)>;

/**
 * Generic swap acceptance in log form:
 * min{0, log pi(theta_sigma) + log r(theta_sigma, sigma^-1) - log pi(theta) - log r(theta, sigma)},
 * and -inf when r(theta, sigma) = 0.
 */
double swap_log_acceptance(const Ensemble& e, const TemperatureLadder& ladder, const Permutation& sigma,
                           const LogSwapRatio& log_ratio);

/// logits[i] = log pi(theta_{sigma_i}) = -sum_k beta_k Phi(theta_{sigma_i(k)}).
SwapProbVector uw_swap_ratio(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms);
double uw_log_ratio(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms,
                    const Permutation& sigma);

/**
 * Draws sigma from the unweighted swapping ratio with one uniform and returns
 * the permuted ensemble. On a group the acceptance is recomputed and must be
 * one (std::logic_error otherwise); on a set that is not closed under
 * composition the acceptance is not identically one and a second uniform
 * decides.
 */
Ensemble uw_swap_step(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms,
                      RandomStream& rng, StepStats* stats = nullptr);

/// Palindromic swap / product / swap iteration.
Ensemble ugpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                   const TargetModel& target, const PermutationSet& perms, std::span<RandomStream> chain_rngs,
                   RandomStream& swap_rng, StepStats* stats = nullptr);

/// log of min{1, exp((beta_i - beta_j)(Phi_i - Phi_j))}; 0-based i != j.
double pt_pair_log_acceptance(const Ensemble& e, const TemperatureLadder& ladder, int i, int j);
Ensemble pt_pair_swap(const Ensemble& e, const TemperatureLadder& ladder, int i, int j, RandomStream& rng,
                      StepStats* stats = nullptr);

/// Pairs (1,2), (2,3), ..., (K-1,K) in order.
Ensemble pt_sweep(const Ensemble& e, const TemperatureLadder& ladder, RandomStream& rng, StepStats* stats = nullptr);
/// Pairs (K-1,K), ..., (1,2) in order.
Ensemble pt_sweep_down(const Ensemble& e, const TemperatureLadder& ladder, RandomStream& rng,
                       StepStats* stats = nullptr);

/// product^{N_s} followed by a sweep.
Ensemble pt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                 const TargetModel& target, int n_s, std::span<RandomStream> chain_rngs, RandomStream& swap_rng,
                 StepStats* stats = nullptr);
/// Sweep up, product^{N_s}, sweep down.
Ensemble rpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                  const TargetModel& target, int n_s, std::span<RandomStream> chain_rngs, RandomStream& swap_rng,
                  StepStats* stats = nullptr);

/// Unordered pairs (i, j), i < j, in lexicographic order.
std::vector<std::pair<int, int>> psdpt_pairs(int K);
/// logits -|Phi_i - Phi_j| over psdpt_pairs(K).
SwapProbVector psdpt_pair_ratio(const Ensemble& e);
double psdpt_log_acceptance(const Ensemble& e, const TemperatureLadder& ladder, int i, int j);
Ensemble psdpt_swap(const Ensemble& e, const TemperatureLadder& ladder, RandomStream& rng,
                    StepStats* stats = nullptr);
/// Product step followed by one state-dependent pair swap.
Ensemble psdpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                    const TargetModel& target, std::span<RandomStream> chain_rngs, RandomStream& swap_rng,
                    StepStats* stats = nullptr);

/// logits[i] = log pi_{sigma_i}(theta) = -sum_k beta_{sigma_i(k)} Phi(theta_k); probs are w_sigma(theta).
SwapProbVector wgpt_weights(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms);

/**
 * Importance weights w_hat(theta, sigma) = pi(theta_sigma) / pi_W(theta) with
 * pi_W = (1/|S|) sum_rho pi_rho. Each lies in [0, |S|] and their mean over S
 * is one.
 */
std::vector<double> is_weights(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms);

struct WeightedSample {
  Ensemble ensemble;
  std::vector<double> weights;
};

/// Advances with the dynamics of perms[choice] and emits the weighted new state.
WeightedSample wgpt_advance(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                            const TargetModel& target, const PermutationSet& perms, std::size_t choice,
                            std::span<RandomStream> chain_rngs, StepStats* stats = nullptr);

/**
 * Draws sigma from the swapping weights, advances with the swapped dynamics
 * p_sigma and returns the new ensemble with its importance weights.
 */
WeightedSample wgpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                         const TargetModel& target, const PermutationSet& perms,
                         std::span<RandomStream> chain_rngs, RandomStream& swap_rng, StepStats* stats = nullptr);

}  // namespace gpt

#endif  // GPT_SWAPS_HPP
