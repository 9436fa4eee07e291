#include "gpt/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpt {

std::size_t burn_in_count(std::size_t n, double burn_frac) {
  if (!(burn_frac >= 0.0 && burn_frac < 1.0)) throw std::invalid_argument("burn_frac must lie in [0,1)");
  const auto b = static_cast<std::size_t>(std::floor(burn_frac * static_cast<double>(n)));
  if (b >= n) throw std::invalid_argument("no samples left after burn-in");
  return b;
}

double ergodic_estimate(const ChainTrace& trace, const QoiFn& qoi, double burn_frac) {
  const std::size_t n = trace.samples.size();
  const std::size_t b = burn_in_count(n, burn_frac);
  double sum = 0.0;
  for (std::size_t i = b; i < n; ++i) sum += qoi(trace.samples[i]);
  return sum / static_cast<double>(n - b);
}

std::vector<double> chain_weights(const WeightedSample& sample, const PermutationSet& perms) {
  if (sample.weights.size() != perms.size()) throw std::invalid_argument("weight count differs from |S|");
  std::vector<double> w(static_cast<std::size_t>(sample.ensemble.size()), 0.0);
  for (std::size_t s = 0; s < perms.size(); ++s) w[static_cast<std::size_t>(perms[s](0))] += sample.weights[s];
  return w;
}

double weighted_estimate(const ChainTrace& trace, const QoiFn& qoi, double burn_frac) {
  if (!trace.perms) throw std::invalid_argument("weighted trace carries no permutation set");
  const std::size_t n = trace.weighted.size();
  const std::size_t b = burn_in_count(n, burn_frac);
  double sum = 0.0;
  for (std::size_t i = b; i < n; ++i) {
    const auto& ws = trace.weighted[i];
    const auto w = chain_weights(ws, *trace.perms);
    for (int k = 0; k < ws.ensemble.size(); ++k) sum += w[static_cast<std::size_t>(k)] * qoi(ws.ensemble.state(k));
  }
  return sum / (static_cast<double>(trace.perms->size()) * static_cast<double>(n - b));
}

double estimate(const ChainTrace& trace, const QoiFn& qoi, double burn_frac) {
  return trace.is_weighted() ? weighted_estimate(trace, qoi, burn_frac) : ergodic_estimate(trace, qoi, burn_frac);
}

Aggregate aggregate_runs(std::span<const double> estimates, std::optional<double> truth) {
  if (estimates.size() < 2) throw std::invalid_argument("aggregation needs at least two runs");
  Aggregate a;
  a.runs = estimates.size();
  const double n = static_cast<double>(a.runs);
  for (double x : estimates) a.mean += x;
  a.mean /= n;
  double ss = 0.0;
  for (double x : estimates) ss += (x - a.mean) * (x - a.mean);
  a.variance = ss / (n - 1.0);
  a.pop_variance = ss / n;
  a.truth = truth;
  if (truth) {
    a.bias = a.mean - *truth;
    double se = 0.0;
    for (double x : estimates) se += (x - *truth) * (x - *truth);
    a.mse = se / n;
  }
  return a;
}

double error_ratio(double baseline_error, double error) {
  if (error == 0.0) return baseline_error == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                                 : std::numeric_limits<double>::infinity();
  return baseline_error / error;
}

}  // namespace gpt
