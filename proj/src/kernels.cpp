#include "gpt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpt {

std::string to_string(KernelKind kind) { return kind == KernelKind::rwm ? "rwm" : "pcn"; }

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "rwm") return KernelKind::rwm;
  if (name == "pcn") return KernelKind::pcn;
  throw std::invalid_argument("unknown kernel kind '" + name + "'");
}

KernelSpec KernelSpec::rwm(double step, Eigen::VectorXd scale) {
  return KernelSpec{KernelKind::rwm, step, std::move(scale)};
}

KernelSpec KernelSpec::pcn(double step) { return KernelSpec{KernelKind::pcn, step, {}}; }

void KernelSpec::validate(int dim) const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("kernel step must be positive");
  if (kind == KernelKind::pcn && !(step < 1.0)) throw std::invalid_argument("pCN step must lie in (0,1)");
  if (scale.size() != 0) {
    if (scale.size() != dim) throw std::invalid_argument("proposal scale has wrong dimension");
    if (!(scale.array() >= 0.0).all() || !scale.allFinite())
      throw std::invalid_argument("proposal scale must be finite and non-negative");
  }
}

StepStats::StepStats(int K)
    : proposed(static_cast<std::size_t>(K), 0), accepted(static_cast<std::size_t>(K), 0),
      last_dynamics(static_cast<std::size_t>(K), 0) {}

double StepStats::acceptance_rate(int k) const {
  const auto p = proposed.at(static_cast<std::size_t>(k));
  return p == 0 ? 0.0 : static_cast<double>(accepted[static_cast<std::size_t>(k)]) / static_cast<double>(p);
}

void StepStats::merge(const StepStats& other) {
  if (proposed.size() < other.proposed.size()) {
    proposed.resize(other.proposed.size(), 0);
    accepted.resize(other.accepted.size(), 0);
  }
  for (std::size_t k = 0; k < other.proposed.size(); ++k) {
    proposed[k] += other.proposed[k];
    accepted[k] += other.accepted[k];
  }
  evaluations += other.evaluations;
  swaps_proposed += other.swaps_proposed;
  swaps_accepted += other.swaps_accepted;
}

double mh_log_acceptance(double beta, const ChainState& current, const ChainState& proposal) {
  if (proposal.potential == kOutOfDomain || proposal.log_prior == -kOutOfDomain) return -kOutOfDomain;
  const double cur = tempered_log_density(beta, current.potential) + current.log_prior;
  if (cur == -kOutOfDomain) return 0.0;
  return std::min(0.0, tempered_log_density(beta, proposal.potential) + proposal.log_prior - cur);
}

bool metropolis_accept(double log_alpha, RandomStream& rng) {
  const double u = rng.uniform();
  return std::log(u) < log_alpha;
}

ChainState evaluate_state(ParamVector theta, const TargetModel& target, StepStats* stats) {
  if (!target.in_domain(theta)) return ChainState{std::move(theta), kOutOfDomain, -kOutOfDomain};
  if (stats) ++stats->evaluations;
  const double phi = target.potential(theta);
  const double lp = target.log_prior(theta);
  return ChainState{std::move(theta), phi, lp};
}

namespace {

KernelResult finish(const ChainState& current, ChainState proposal, double log_alpha, RandomStream& rng) {
  const bool evaluated = proposal.potential != kOutOfDomain;
  if (metropolis_accept(log_alpha, rng)) return KernelResult{std::move(proposal), true, evaluated};
  return KernelResult{current, false, evaluated};
}

}  // namespace

KernelResult rwm_step(const ChainState& current, double beta, const TargetModel& target,
                      const KernelSpec& spec, RandomStream& rng) {
  const auto d = current.theta.size();
  ParamVector theta(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double s = spec.scale.size() ? spec.scale[i] : 1.0;
    theta[i] = current.theta[i] + spec.step * s * rng.normal();
  }
  ChainState proposal = evaluate_state(std::move(theta), target, nullptr);
  const double log_alpha = mh_log_acceptance(beta, current, proposal);
  return finish(current, std::move(proposal), log_alpha, rng);
}

KernelResult pcn_step(const ChainState& current, double beta, const TargetModel& target,
                      const KernelSpec& spec, RandomStream& rng) {
  const Eigen::VectorXd* l = target.normal_prior_scale();
  if (!l) throw std::invalid_argument("pCN requires a target with a centered normal prior");
  const double keep = std::sqrt(1.0 - spec.step * spec.step);
  const auto d = current.theta.size();
  ParamVector theta(d);
  for (Eigen::Index i = 0; i < d; ++i) theta[i] = keep * current.theta[i] + spec.step * (*l)[i] * rng.normal();
  ChainState proposal = evaluate_state(std::move(theta), target, nullptr);
  double log_alpha = -kOutOfDomain;
  if (proposal.potential != kOutOfDomain)
    log_alpha = tempered_log_density(beta, proposal.potential) - tempered_log_density(beta, current.potential);
  return finish(current, std::move(proposal), log_alpha, rng);
}

KernelResult kernel_step(const ChainState& current, double beta, const TargetModel& target,
                         const KernelSpec& spec, RandomStream& rng) {
  return spec.kind == KernelKind::rwm ? rwm_step(current, beta, target, spec, rng)
                                      : pcn_step(current, beta, target, spec, rng);
}

Ensemble product_step(const Ensemble& e, const TemperatureLadder& ladder,
                      std::span<const KernelSpec> specs, const TargetModel& target,
                      std::span<RandomStream> rngs, StepStats* stats, const Permutation* sigma) {
  const int K = e.size();
  if (ladder.size() != K || static_cast<int>(specs.size()) != K || static_cast<int>(rngs.size()) != K)
    throw std::invalid_argument("product step: ladder, specs and streams must all have K entries");
  if (sigma && sigma->size() != K) throw std::invalid_argument("product step: permutation length differs from K");

  std::vector<ChainState> next;
  next.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const int dyn = sigma ? (*sigma)(k) : k;
    auto r = kernel_step(e.chain(k), ladder.beta(dyn), target, specs[static_cast<std::size_t>(dyn)],
                         rngs[static_cast<std::size_t>(k)]);
    if (stats) {
      ++stats->proposed.at(static_cast<std::size_t>(dyn));
      if (r.accepted) ++stats->accepted[static_cast<std::size_t>(dyn)];
      if (r.evaluated) ++stats->evaluations;
      stats->last_dynamics.at(static_cast<std::size_t>(k)) = dyn;
    }
    next.push_back(std::move(r.state));
  }
  return Ensemble(std::move(next));
}

}  // namespace gpt
