#ifndef GPT_ESTIMATORS_HPP
#define GPT_ESTIMATORS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/kernels.hpp"
#include "gpt/swaps.hpp"

namespace gpt {

using QoiFn = std::function<double(const ParamVector&)>;

/**
 * Output of one run: the cold-chain states, or for weighted runs the full
 * weighted ensembles. Exactly one of `samples` / `weighted` is filled.
 */
struct ChainTrace {
  std::string algorithm;
  std::shared_ptr<const PermutationSet> perms;  // weighted traces only
  std::vector<ParamVector> samples;
  std::vector<WeightedSample> weighted;
  StepStats stats;

  bool is_weighted() const { return !weighted.empty(); }
  std::size_t size() const { return is_weighted() ? weighted.size() : samples.size(); }
};

/// b = floor(burn_frac * N); throws if burn_frac is outside [0,1) or nothing is left.
std::size_t burn_in_count(std::size_t n, double burn_frac);

/// Mean of Q over the cold-chain samples after burn-in.
double ergodic_estimate(const ChainTrace& trace, const QoiFn& qoi, double burn_frac);

/// W_k = sum over sigma with sigma(1) = k of w_hat(theta, sigma).
std::vector<double> chain_weights(const WeightedSample& sample, const PermutationSet& perms);

/// (1/(|S|(N-b))) sum_{n>b} sum_k W_k(theta^n) Q(theta^n_k).
double weighted_estimate(const ChainTrace& trace, const QoiFn& qoi, double burn_frac);

/// Weighted or ergodic estimate according to the trace kind.
double estimate(const ChainTrace& trace, const QoiFn& qoi, double burn_frac);

struct RunSummary {
  int run = 0;
  std::string algorithm;
  std::vector<std::string> qoi_names;
  std::vector<double> estimates;
  std::size_t n = 0;
  std::size_t burn = 0;
  std::uint64_t seed = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t proposals = 0;  // base-kernel proposals, off-domain ones included
  std::vector<double> acceptance;
  double seconds = 0.0;
};

struct Aggregate {
  std::size_t runs = 0;
  double mean = 0.0;
  double variance = 0.0;      // sample variance (n - 1)
  double pop_variance = 0.0;  // (1/n) sum (x - mean)^2
  std::optional<double> truth;
  double bias = 0.0;
  double mse = 0.0;           // mean (x - truth)^2; equals pop_variance + bias^2
  /// MSE when a truth is known, sample variance otherwise.
  double error() const { return truth ? mse : variance; }
};

/// Requires at least two estimates.
Aggregate aggregate_runs(std::span<const double> estimates, std::optional<double> truth);

/// baseline error / this error; +inf for a zero error, NaN if both vanish.
double error_ratio(double baseline_error, double error);

}  // namespace gpt

#endif  // GPT_ESTIMATORS_HPP
