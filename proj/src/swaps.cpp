#include "gpt/swaps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpt {

namespace {

// The recomputed unweighted acceptance is a difference of two log-sum-exps of
// the same logits summed in different orders, so round-off scales with them.
constexpr double kUnitAcceptanceTol = 1e-12;

double max_abs(std::span<const double> x) {
  double m = 1.0;
  for (double v : x)
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

SwapProbVector SwapProbVector::from_logits(std::vector<double> logits) {
  SwapProbVector v;
  v.probs = softmax(logits);
  v.logits = std::move(logits);
  return v;
}

std::size_t sample_categorical(std::span<const double> probs, double u) {
  if (probs.empty()) throw std::invalid_argument("categorical draw from an empty distribution");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Round-off may leave the cumulative sum just below one; skip trailing zeros.
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] == 0.0) --last;
  return last;
}

double swap_log_acceptance(const Ensemble& e, const TemperatureLadder& ladder, const Permutation& sigma,
                           const LogSwapRatio& log_ratio) {
  const double fwd = log_ratio(e, sigma);
  if (fwd == -kOutOfDomain) return -kOutOfDomain;
  const Ensemble swapped = permute_ensemble(e, sigma);
  const double rev = log_ratio(swapped, sigma.inverse());
  const double la = log_joint_density(swapped, ladder) + rev - log_joint_density(e, ladder) - fwd;
  if (std::isnan(la)) return -kOutOfDomain;
  return std::min(0.0, la);
}

// ---------------------------------------------------------------------------
// Unweighted generalized swaps

SwapProbVector uw_swap_ratio(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms) {
  if (perms.K() != e.size()) throw std::invalid_argument("permutation set size differs from ensemble size");
  std::vector<double> logits;
  logits.reserve(perms.size());
  for (const auto& sigma : perms) logits.push_back(log_permuted_density(e, ladder, sigma));
  if (std::all_of(logits.begin(), logits.end(), [](double v) { return v == -kOutOfDomain; }))
    throw std::logic_error("unweighted swap ratio on an ensemble with no admissible permutation");
  return SwapProbVector::from_logits(std::move(logits));
}

double uw_log_ratio(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms,
                    const Permutation& sigma) {
  if (!perms.index_of(sigma)) return -kOutOfDomain;
  std::vector<double> logits;
  logits.reserve(perms.size());
  for (const auto& rho : perms) logits.push_back(log_permuted_density(e, ladder, rho));
  return log_permuted_density(e, ladder, sigma) - log_sum_exp(logits);
}

Ensemble uw_swap_step(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms,
                      RandomStream& rng, StepStats* stats) {
  const SwapProbVector r = uw_swap_ratio(e, ladder, perms);
  const Permutation& sigma = perms[sample_categorical(r.probs, rng.uniform())];
  if (stats) ++stats->swaps_proposed;

  const auto ratio = [&](const Ensemble& x, const Permutation& s) { return uw_log_ratio(x, ladder, perms, s); };
  const double la = swap_log_acceptance(e, ladder, sigma, ratio);
  if (perms.is_group()) {
    if (!(std::abs(la) <= kUnitAcceptanceTol * max_abs(r.logits)))
      throw std::logic_error("unweighted swap acceptance differs from one: log alpha = " + std::to_string(la));
  } else if (!metropolis_accept(la, rng)) {
    return e;
  }
  if (stats) ++stats->swaps_accepted;
  return permute_ensemble(e, sigma);
}

Ensemble ugpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                   const TargetModel& target, const PermutationSet& perms, std::span<RandomStream> chain_rngs,
                   RandomStream& swap_rng, StepStats* stats) {
  Ensemble x = uw_swap_step(e, ladder, perms, swap_rng, stats);
  x = product_step(x, ladder, specs, target, chain_rngs, stats);
  return uw_swap_step(x, ladder, perms, swap_rng, stats);
}

// ---------------------------------------------------------------------------
// Pairwise PT

double pt_pair_log_acceptance(const Ensemble& e, const TemperatureLadder& ladder, int i, int j) {
  if (i == j) return 0.0;
  const double la = (ladder.beta(i) - ladder.beta(j)) * (e.potential(i) - e.potential(j));
  if (std::isnan(la)) return -kOutOfDomain;
  return std::min(0.0, la);
}

Ensemble pt_pair_swap(const Ensemble& e, const TemperatureLadder& ladder, int i, int j, RandomStream& rng,
                      StepStats* stats) {
  if (i < 0 || j < 0 || i >= e.size() || j >= e.size() || i == j)
    throw std::out_of_range("PT swap needs two distinct chain indices");
  if (stats) ++stats->swaps_proposed;
  if (!metropolis_accept(pt_pair_log_acceptance(e, ladder, i, j), rng)) return e;
  if (stats) ++stats->swaps_accepted;
  return permute_ensemble(e, Permutation::transposition(e.size(), i, j));
}

Ensemble pt_sweep(const Ensemble& e, const TemperatureLadder& ladder, RandomStream& rng, StepStats* stats) {
  Ensemble x = e;
  for (int k = 0; k + 1 < e.size(); ++k) x = pt_pair_swap(x, ladder, k, k + 1, rng, stats);
  return x;
}

Ensemble pt_sweep_down(const Ensemble& e, const TemperatureLadder& ladder, RandomStream& rng, StepStats* stats) {
  Ensemble x = e;
  for (int k = e.size() - 2; k >= 0; --k) x = pt_pair_swap(x, ladder, k, k + 1, rng, stats);
  return x;
}

Ensemble pt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                 const TargetModel& target, int n_s, std::span<RandomStream> chain_rngs, RandomStream& swap_rng,
                 StepStats* stats) {
  if (n_s < 1) throw std::invalid_argument("N_s must be >= 1");
  Ensemble x = e;
  for (int s = 0; s < n_s; ++s) x = product_step(x, ladder, specs, target, chain_rngs, stats);
  return pt_sweep(x, ladder, swap_rng, stats);
}

Ensemble rpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                  const TargetModel& target, int n_s, std::span<RandomStream> chain_rngs, RandomStream& swap_rng,
                  StepStats* stats) {
  if (n_s < 1) throw std::invalid_argument("N_s must be >= 1");
  Ensemble x = pt_sweep(e, ladder, swap_rng, stats);
  for (int s = 0; s < n_s; ++s) x = product_step(x, ladder, specs, target, chain_rngs, stats);
  return pt_sweep_down(x, ladder, swap_rng, stats);
}

// ---------------------------------------------------------------------------
// State-dependent pairwise swaps

std::vector<std::pair<int, int>> psdpt_pairs(int K) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) pairs.emplace_back(i, j);
  return pairs;
}

SwapProbVector psdpt_pair_ratio(const Ensemble& e) {
  if (e.size() < 2) throw std::invalid_argument("PSDPT needs K >= 2");
  std::vector<double> logits;
  for (const auto& [i, j] : psdpt_pairs(e.size())) {
    const double d = std::abs(e.potential(i) - e.potential(j));
    logits.push_back(std::isnan(d) ? 0.0 : -d);
  }
  return SwapProbVector::from_logits(std::move(logits));
}

double psdpt_log_acceptance(const Ensemble& e, const TemperatureLadder& ladder, int i, int j) {
  const double la = (ladder.beta(j) - ladder.beta(i)) * (e.potential(j) - e.potential(i));
  if (std::isnan(la)) return -kOutOfDomain;
  return std::min(0.0, la);
}

Ensemble psdpt_swap(const Ensemble& e, const TemperatureLadder& ladder, RandomStream& rng, StepStats* stats) {
  const SwapProbVector r = psdpt_pair_ratio(e);
  const auto pairs = psdpt_pairs(e.size());
  const auto [i, j] = pairs[sample_categorical(r.probs, rng.uniform())];
  if (stats) ++stats->swaps_proposed;
  if (!metropolis_accept(psdpt_log_acceptance(e, ladder, i, j), rng)) return e;
  if (stats) ++stats->swaps_accepted;
  return permute_ensemble(e, Permutation::transposition(e.size(), i, j));
}

Ensemble psdpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                    const TargetModel& target, std::span<RandomStream> chain_rngs, RandomStream& swap_rng,
                    StepStats* stats) {
  const Ensemble x = product_step(e, ladder, specs, target, chain_rngs, stats);
  return psdpt_swap(x, ladder, swap_rng, stats);
}

// ---------------------------------------------------------------------------
// Weighted generalized swaps

SwapProbVector wgpt_weights(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms) {
  if (perms.K() != e.size()) throw std::invalid_argument("permutation set size differs from ensemble size");
  std::vector<double> logits;
  logits.reserve(perms.size());
  for (const auto& sigma : perms) logits.push_back(log_joint_density(e, ladder, sigma));
  if (std::all_of(logits.begin(), logits.end(), [](double v) { return v == -kOutOfDomain; }))
    throw std::logic_error("swapping weights on an ensemble with no admissible permutation");
  return SwapProbVector::from_logits(std::move(logits));
}

std::vector<double> is_weights(const Ensemble& e, const TemperatureLadder& ladder, const PermutationSet& perms) {
  const SwapProbVector w = wgpt_weights(e, ladder, perms);
  const double log_pi_w = log_sum_exp(w.logits) - std::log(static_cast<double>(perms.size()));
  std::vector<double> out;
  out.reserve(perms.size());
  for (const auto& sigma : perms) out.push_back(std::exp(log_permuted_density(e, ladder, sigma) - log_pi_w));
  return out;
}

WeightedSample wgpt_advance(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                            const TargetModel& target, const PermutationSet& perms, std::size_t choice,
                            std::span<RandomStream> chain_rngs, StepStats* stats) {
  const Permutation& sigma = perms[choice];
  Ensemble next = product_step(e, ladder, specs, target, chain_rngs, stats, &sigma);
  auto weights = is_weights(next, ladder, perms);
  return WeightedSample{std::move(next), std::move(weights)};
}

WeightedSample wgpt_step(const Ensemble& e, const TemperatureLadder& ladder, std::span<const KernelSpec> specs,
                         const TargetModel& target, const PermutationSet& perms,
                         std::span<RandomStream> chain_rngs, RandomStream& swap_rng, StepStats* stats) {
  const SwapProbVector w = wgpt_weights(e, ladder, perms);
  const std::size_t choice = sample_categorical(w.probs, swap_rng.uniform());
  if (stats) {
    ++stats->swaps_proposed;
    ++stats->swaps_accepted;
  }
  return wgpt_advance(e, ladder, specs, target, perms, choice, chain_rngs, stats);
}

}  // namespace gpt
