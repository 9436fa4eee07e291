#include "gpt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "gpt/estimators.hpp"
#include "gpt/kernels.hpp"
#include "gpt/swaps.hpp"

namespace gpt::verify {

namespace {

double to_prob(double log_alpha) { return log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector normalized_exp(const std::vector<double>& logd) {
  const auto p = softmax(logd);
  return Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
}

/// Row i gets mass a on column `to` and 1 - a on the diagonal, times `weight`.
void add_move(Matrix& p, std::size_t from, std::size_t to, double weight, double a) {
  const auto i = static_cast<Eigen::Index>(from);
  p(i, static_cast<Eigen::Index>(to)) += weight * a;
  p(i, i) += weight * (1.0 - a);
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteTarget / DiscreteSpace

DiscreteTarget::DiscreteTarget(std::vector<double> potentials) : phi_(std::move(potentials)) {
  if (phi_.empty()) throw std::invalid_argument("discrete target needs at least one point");
  for (double v : phi_)
    if (!std::isfinite(v)) throw std::invalid_argument("discrete potentials must be finite");
}

bool DiscreteTarget::in_domain(const ParamVector& theta) const {
  if (theta.size() != 1 || !std::isfinite(theta[0])) return false;
  const double r = std::round(theta[0]);
  return r == theta[0] && r >= 0.0 && r < static_cast<double>(phi_.size());
}

double DiscreteTarget::potential(const ParamVector& theta) const {
  return in_domain(theta) ? phi_[static_cast<std::size_t>(theta[0])] : kOutOfDomain;
}

double DiscreteTarget::log_prior(const ParamVector& theta) const { return in_domain(theta) ? 0.0 : -kOutOfDomain; }

ParamVector DiscreteTarget::sample_prior(RandomStream& rng) const {
  const auto i = static_cast<int>(rng.uniform() * static_cast<double>(phi_.size()));
  return ParamVector::Constant(1, std::min(i, points() - 1));
}

std::vector<Qoi> DiscreteTarget::qois() const {
  return {Qoi{"point", [](const ParamVector& t) { return t[0]; }}};
}

DiscreteSpace::DiscreteSpace(std::vector<double> potentials, TemperatureLadder ladder, std::size_t cap)
    : target_(std::move(potentials)), ladder_(std::move(ladder)), size_(1) {
  for (int k = 0; k < ladder_.size(); ++k) {
    size_ *= static_cast<std::size_t>(target_.points());
    if (size_ > cap)
      throw std::invalid_argument("joint space of size m^K exceeds the cap of " + std::to_string(cap));
  }
}

std::vector<int> DiscreteSpace::tuple(std::size_t index) const {
  std::vector<int> t(static_cast<std::size_t>(K()));
  const auto m = static_cast<std::size_t>(points());
  for (int k = K() - 1; k >= 0; --k) {
    t[static_cast<std::size_t>(k)] = static_cast<int>(index % m);
    index /= m;
  }
  return t;
}

std::size_t DiscreteSpace::index(std::span<const int> tuple) const {
  std::size_t idx = 0;
  for (int s : tuple) idx = idx * static_cast<std::size_t>(points()) + static_cast<std::size_t>(s);
  return idx;
}

Ensemble DiscreteSpace::ensemble(std::size_t index) const {
  std::vector<ChainState> chains;
  for (int s : tuple(index)) chains.push_back(ChainState{ParamVector::Constant(1, s), target_.phi(s), 0.0});
  return Ensemble(std::move(chains));
}

std::size_t DiscreteSpace::index_of(const Ensemble& e) const {
  std::vector<int> t;
  for (int k = 0; k < e.size(); ++k) t.push_back(static_cast<int>(std::lround(e.state(k)[0])));
  return index(t);
}

Vector DiscreteSpace::tempered(int k) const {
  std::vector<double> logd;
  for (int i = 0; i < points(); ++i) logd.push_back(tempered_log_density(ladder_.beta(k), target_.phi(i)));
  return normalized_exp(logd);
}

Vector DiscreteSpace::product_density(const Permutation& sigma) const {
  std::vector<double> logd;
  logd.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) logd.push_back(log_joint_density(ensemble(i), ladder_, sigma));
  return normalized_exp(logd);
}

Vector DiscreteSpace::mu() const { return product_density(Permutation::identity(K())); }

Vector DiscreteSpace::mu_w(const PermutationSet& perms) const {
  Vector w = Vector::Zero(static_cast<Eigen::Index>(size_));
  for (const auto& sigma : perms) w += product_density(sigma);
  return w / static_cast<double>(perms.size());
}

// ---------------------------------------------------------------------------
// Matrix builders

Matrix base_matrix(const DiscreteSpace& space, int k, BaseKind kind) {
  const int m = space.points();
  if (kind == BaseKind::identity) return Matrix::Identity(m, m);
  const double beta = space.ladder().beta(k);
  Matrix p = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const ChainState cur{ParamVector::Constant(1, i), space.target().phi(i), 0.0};
    for (int j : {i - 1, i + 1}) {
      if (j < 0 || j >= m) continue;
      const ChainState prop{ParamVector::Constant(1, j), space.target().phi(j), 0.0};
      p(i, j) = 0.25 * to_prob(mh_log_acceptance(beta, cur, prop));
    }
    p(i, i) = 1.0 - p.row(i).sum();
  }
  return p;
}

Matrix product_matrix(std::span<const Matrix> bases, const Permutation* sigma) {
  if (bases.empty()) throw std::invalid_argument("product of no kernels");
  const auto K = static_cast<int>(bases.size());
  const auto pick = [&](int k) -> const Matrix& { return bases[static_cast<std::size_t>(sigma ? (*sigma)(k) : k)]; };
  Matrix out = pick(0);
  for (int k = 1; k < K; ++k) out = kron(out, pick(k));
  return out;
}

Matrix product_matrix(const DiscreteSpace& space, BaseKind kind, const Permutation* sigma) {
  std::vector<Matrix> bases;
  for (int k = 0; k < space.K(); ++k) bases.push_back(base_matrix(space, k, kind));
  return product_matrix(bases, sigma);
}

Matrix swap_matrix_uw(const DiscreteSpace& space, const PermutationSet& perms) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix p = Matrix::Zero(n, n);
  const auto ratio = [&](const Ensemble& x, const Permutation& s) {
    return uw_log_ratio(x, space.ladder(), perms, s);
  };
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Ensemble e = space.ensemble(i);
    const SwapProbVector r = uw_swap_ratio(e, space.ladder(), perms);
    for (std::size_t s = 0; s < perms.size(); ++s) {
      const double a = to_prob(swap_log_acceptance(e, space.ladder(), perms[s], ratio));
      add_move(p, i, space.index_of(permute_ensemble(e, perms[s])), r.probs[s], a);
    }
  }
  return p;
}

Matrix swap_matrix_pt_pair(const DiscreteSpace& space, int i, int j) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix p = Matrix::Zero(n, n);
  const Permutation tau = Permutation::transposition(space.K(), i, j);
  for (std::size_t x = 0; x < space.size(); ++x) {
    const Ensemble e = space.ensemble(x);
    add_move(p, x, space.index_of(permute_ensemble(e, tau)), 1.0,
             to_prob(pt_pair_log_acceptance(e, space.ladder(), i, j)));
  }
  return p;
}

Matrix pt_sweep_matrix(const DiscreteSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix p = Matrix::Identity(n, n);
  for (int k = 0; k + 1 < space.K(); ++k) p = p * swap_matrix_pt_pair(space, k, k + 1);
  return p;
}

Matrix pt_sweep_down_matrix(const DiscreteSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix p = Matrix::Identity(n, n);
  for (int k = space.K() - 2; k >= 0; --k) p = p * swap_matrix_pt_pair(space, k, k + 1);
  return p;
}

Matrix psdpt_swap_matrix(const DiscreteSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix p = Matrix::Zero(n, n);
  const auto pairs = psdpt_pairs(space.K());
  for (std::size_t x = 0; x < space.size(); ++x) {
    const Ensemble e = space.ensemble(x);
    const SwapProbVector r = psdpt_pair_ratio(e);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto [i, j] = pairs[q];
      const double a = to_prob(psdpt_log_acceptance(e, space.ladder(), i, j));
      add_move(p, x, space.index_of(permute_ensemble(e, Permutation::transposition(space.K(), i, j))), r.probs[q], a);
    }
  }
  return p;
}

Matrix ugpt_matrix(const DiscreteSpace& space, const PermutationSet& perms, BaseKind kind) {
  const Matrix q = swap_matrix_uw(space, perms);
  return q * product_matrix(space, kind) * q;
}

Matrix rpt_matrix(const DiscreteSpace& space, int n_s, BaseKind kind) {
  const Matrix p = product_matrix(space, kind);
  Matrix pn = Matrix::Identity(p.rows(), p.cols());
  for (int s = 0; s < n_s; ++s) pn = pn * p;
  return pt_sweep_matrix(space) * pn * pt_sweep_down_matrix(space);
}

Matrix wgpt_matrix(const DiscreteSpace& space, const PermutationSet& perms, BaseKind kind) {
  std::vector<Matrix> swapped;
  for (const auto& sigma : perms) swapped.push_back(product_matrix(space, kind, &sigma));
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t x = 0; x < space.size(); ++x) {
    const SwapProbVector w = wgpt_weights(space.ensemble(x), space.ladder(), perms);
    const auto i = static_cast<Eigen::Index>(x);
    for (std::size_t s = 0; s < perms.size(); ++s) p.row(i) += w.probs[s] * swapped[s].row(i);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Checks

double row_sum_error(const Matrix& p) { return (p.rowwise().sum().array() - 1.0).abs().maxCoeff(); }

double check_reversibility(const Matrix& p, const Vector& pi) {
  const Matrix flow = pi.asDiagonal() * p;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

double check_invariance(const Vector& pi, const Matrix& p) {
  return (p.transpose() * pi - pi).lpNorm<1>();
}

Vector stationary(const Matrix& p) {
  const Matrix a = p.transpose() - Matrix::Identity(p.rows(), p.cols());
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-11);
  const Matrix ker = lu.kernel();
  if (ker.cols() != 1) throw std::runtime_error("stationary distribution is not unique (reducible chain)");
  Vector v = ker.col(0);
  v /= v.sum();
  return v;
}

double l2_norm_mean_zero(const Matrix& p, const Vector& pi) {
  const Vector s = pi.cwiseSqrt();
  Matrix a = s.asDiagonal() * p * s.cwiseInverse().asDiagonal();
  a -= s * s.transpose();
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double spectral_gap(const Matrix& p, const Vector& pi) {
  if (check_reversibility(p, pi) > 1e-10) throw std::invalid_argument("spectral gap needs a pi-reversible matrix");
  const Vector s = pi.cwiseSqrt();
  Matrix a = s.asDiagonal() * p * s.cwiseInverse().asDiagonal();
  a -= s * s.transpose();
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return 1.0 - es.eigenvalues().cwiseAbs().maxCoeff();
}

double overlap(const Vector& a, const Vector& b, const Vector* ref) {
  if (a.size() != b.size() || (ref && ref->size() != a.size())) throw std::invalid_argument("overlap size mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += std::min(a[i], b[i]) * (ref ? (*ref)[i] : 1.0);
  return s;
}

double min_pairwise_overlap(const DiscreteSpace& space, const PermutationSet& perms) {
  std::vector<Vector> dens;
  for (const auto& sigma : perms) dens.push_back(space.product_density(sigma));
  double lam = 1.0;
  for (std::size_t a = 0; a < dens.size(); ++a)
    for (std::size_t b = a + 1; b < dens.size(); ++b) lam = std::min(lam, overlap(dens[a], dens[b]));
  return lam;
}

VarianceBoundResult variance_bound_check(const DiscreteSpace& space, const PermutationSet& perms, int trials,
                                         RandomStream& rng) {
  std::vector<Vector> dens;
  for (const auto& sigma : perms) dens.push_back(space.product_density(sigma));
  const Vector muw = space.mu_w(perms);

  VarianceBoundResult res;
  res.lambda_m = min_pairwise_overlap(space, perms);
  res.bound = res.lambda_m / (2.0 - res.lambda_m);
  res.worst_slack = std::numeric_limits<double>::infinity();
  res.max_average = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(space.size());
  for (int t = 0; t < trials; ++t) {
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = rng.normal();
    f.array() -= muw.dot(f);
    f /= std::sqrt(muw.dot(f.cwiseAbs2()));
    double avg = 0.0;
    for (const auto& d : dens) {
      const double m1 = d.dot(f);
      avg += d.dot(f.cwiseAbs2()) - m1 * m1;
    }
    avg /= static_cast<double>(dens.size());
    res.worst_slack = std::min(res.worst_slack, avg - res.bound);
    res.max_average = std::max(res.max_average, avg);
  }
  return res;
}

GapBoundResult wgpt_gap_bound_check(const DiscreteSpace& space, const PermutationSet& perms, BaseKind kind) {
  GapBoundResult res;
  res.lambda_m = min_pairwise_overlap(space, perms);
  double worst = 0.0;
  for (const auto& sigma : perms) {
    const double nrm = l2_norm_mean_zero(product_matrix(space, kind, &sigma), space.product_density(sigma));
    worst = std::max(worst, nrm * nrm);
  }
  res.gamma = 1.0 - worst;
  const double nw = l2_norm_mean_zero(wgpt_matrix(space, perms, kind), space.mu_w(perms));
  res.norm_sq = nw * nw;
  res.bound = 1.0 - res.gamma * res.lambda_m / (2.0 - res.lambda_m);
  res.slack = res.bound - res.norm_sq;
  return res;
}

double weighted_estimator_error(const DiscreteSpace& space, const PermutationSet& perms, const Vector& q) {
  if (q.size() != space.points()) throw std::invalid_argument("QoI must have one value per point");
  const Vector muw = stationary(wgpt_matrix(space, perms));
  double est = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    const Ensemble e = space.ensemble(x);
    const WeightedSample ws{e, is_weights(e, space.ladder(), perms)};
    const auto w = chain_weights(ws, perms);
    double val = 0.0;
    for (int k = 0; k < e.size(); ++k) val += w[static_cast<std::size_t>(k)] * q[static_cast<Eigen::Index>(e.state(k)[0])];
    est += muw[static_cast<Eigen::Index>(x)] * val / static_cast<double>(perms.size());
  }
  return std::abs(est - space.tempered(0).dot(q));
}

// ---------------------------------------------------------------------------
// Simulation cross-check

Ensemble discrete_product_step(const DiscreteSpace& space, const Ensemble& e, std::span<RandomStream> rngs,
                               const Permutation* sigma) {
  std::vector<ChainState> next;
  for (int k = 0; k < e.size(); ++k) {
    auto& rng = rngs[static_cast<std::size_t>(k)];
    const ChainState& cur = e.chain(k);
    const int i = static_cast<int>(cur.theta[0]);
    const double u = rng.uniform();
    const int j = u < 0.25 ? i - 1 : (u < 0.5 ? i + 1 : i);
    if (j == i || j < 0 || j >= space.points()) {
      next.push_back(cur);
      continue;
    }
    ChainState prop{ParamVector::Constant(1, j), space.target().phi(j), 0.0};
    const double beta = space.ladder().beta(sigma ? (*sigma)(k) : k);
    next.push_back(metropolis_accept(mh_log_acceptance(beta, cur, prop), rng) ? prop : cur);
  }
  return Ensemble(std::move(next));
}

SimulationCheck simulate_ugpt_row(const DiscreteSpace& space, const PermutationSet& perms, std::size_t start,
                                  std::size_t draws, std::uint64_t seed) {
  const Matrix p = ugpt_matrix(space, perms);
  std::vector<RandomStream> rngs;
  for (int k = 0; k < space.K(); ++k) rngs.push_back(RandomStream::derive(seed, 0, static_cast<std::uint64_t>(k)));
  auto swap_rng = RandomStream::derive(seed, 0, StreamTag::swap);

  std::vector<std::size_t> counts(space.size(), 0);
  const Ensemble e0 = space.ensemble(start);
  for (std::size_t d = 0; d < draws; ++d) {
    Ensemble e = uw_swap_step(e0, space.ladder(), perms, swap_rng);
    e = discrete_product_step(space, e, rngs);
    e = uw_swap_step(e, space.ladder(), perms, swap_rng);
    ++counts[space.index_of(e)];
  }

  SimulationCheck res;
  res.draws = draws;
  const auto row = static_cast<Eigen::Index>(start);
  for (std::size_t y = 0; y < space.size(); ++y) {
    const double py = p(row, static_cast<Eigen::Index>(y));
    const double freq = static_cast<double>(counts[y]) / static_cast<double>(draws);
    if (py <= 1e-15) {
      if (counts[y] > 0) res.support_ok = false;
      continue;
    }
    const double sd = std::sqrt(py * (1.0 - py) / static_cast<double>(draws));
    if (sd > 0.0) res.max_z = std::max(res.max_z, std::abs(freq - py) / sd);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite

namespace {

TemperatureLadder random_ladder(int K, RandomStream& rng, bool zero_top) {
  std::vector<double> b{1.0};
  std::vector<double> rest;
  for (int k = 1; k < K; ++k) rest.push_back(0.05 + 0.9 * rng.uniform());
  std::sort(rest.rbegin(), rest.rend());
  for (std::size_t i = 1; i < rest.size(); ++i)
    if (!(rest[i] < rest[i - 1])) rest[i] = 0.5 * rest[i - 1];
  b.insert(b.end(), rest.begin(), rest.end());
  if (zero_top && K >= 2) b.back() = 0.0;
  return TemperatureLadder(std::move(b));
}

Ensemble random_ensemble(int K, RandomStream& rng) {
  std::vector<ChainState> chains;
  for (int k = 0; k < K; ++k) chains.push_back(ChainState{ParamVector::Constant(1, k), 10.0 * rng.uniform(), 0.0});
  return Ensemble(std::move(chains));
}

struct Worst {
  double value;
  bool upper;
  void add(double v) { value = upper ? std::max(value, v) : std::min(value, v); }
};

Worst worst_upper() { return Worst{-std::numeric_limits<double>::infinity(), true}; }
Worst worst_lower() { return Worst{std::numeric_limits<double>::infinity(), false}; }

CheckRow row(std::string name, const Worst& w, double threshold) {
  const bool ok = w.upper ? w.value <= threshold : w.value >= threshold;
  return CheckRow{std::move(name), w.value, threshold, w.upper, ok};
}

}  // namespace

std::vector<CheckRow> run_oracle_suite(const OracleOptions& options) {
  auto rng = RandomStream::derive(options.seed, 0, StreamTag::init);

  Worst base_rev = worst_upper(), uw_rev = worst_upper(), ugpt_rev = worst_upper(), wgpt_rev = worst_upper();
  Worst rows = worst_upper(), wgpt_stat = worst_upper(), ugpt_stat = worst_upper(), uw_inv = worst_upper();
  Worst rpt_rev = worst_upper(), psdpt_rev = worst_upper(), sweep_rev = worst_upper();
  Worst gap_gain = worst_lower(), var_slack = worst_lower(), var_upper = worst_upper();
  Worst gap_slack = worst_lower(), gap_slack_id = worst_lower(), est_err = worst_upper();

  int used = 0;
  for (int t = 0; t < options.instances; ++t) {
    const int m = 2 + t % 3;
    const int K = 2 + (t / 3) % 2;
    std::size_t size = 1;
    for (int k = 0; k < K; ++k) size *= static_cast<std::size_t>(m);
    if (size > options.cap) continue;
    ++used;

    std::vector<double> phi;
    for (int i = 0; i < m; ++i) phi.push_back(4.0 * rng.uniform());
    const DiscreteSpace space(phi, random_ladder(K, rng, t % 4 == 3), options.cap);
    const auto perms = PermutationSet::full(K);
    const Vector mu = space.mu();
    const Vector muw = space.mu_w(perms);

    for (int k = 0; k < K; ++k) base_rev.add(check_reversibility(base_matrix(space, k), space.tempered(k)));
    const Matrix q = swap_matrix_uw(space, perms);
    const Matrix p = product_matrix(space);
    const Matrix ugpt = q * p * q;
    const Matrix wgpt = wgpt_matrix(space, perms);
    const Matrix rpt = rpt_matrix(space);
    const Matrix psd = psdpt_swap_matrix(space);
    const Matrix sweep = pt_sweep_matrix(space);

    uw_rev.add(check_reversibility(q, mu));
    ugpt_rev.add(check_reversibility(ugpt, mu));
    wgpt_rev.add(check_reversibility(wgpt, muw));
    rpt_rev.add(check_reversibility(rpt, mu));
    psdpt_rev.add(check_reversibility(psd, mu));
    sweep_rev.add(check_reversibility(sweep, mu));
    for (const Matrix* mat : {&q, &p, &ugpt, &wgpt, &rpt, &psd, &sweep}) rows.add(row_sum_error(*mat));
    uw_inv.add(check_invariance(mu, q));
    wgpt_stat.add((stationary(wgpt) - muw).lpNorm<1>());
    ugpt_stat.add((stationary(ugpt) - mu).lpNorm<1>());
    gap_gain.add(spectral_gap(ugpt, mu) - spectral_gap(p, mu));

    const auto vb = variance_bound_check(space, perms, options.variance_trials, rng);
    var_slack.add(vb.worst_slack);
    var_upper.add(vb.max_average);
    gap_slack.add(wgpt_gap_bound_check(space, perms).slack);
    gap_slack_id.add(wgpt_gap_bound_check(space, perms, BaseKind::identity).slack);

    Vector qoi(m);
    for (int i = 0; i < m; ++i) qoi[i] = rng.normal();
    est_err.add(weighted_estimator_error(space, perms, qoi));
  }
  if (used == 0) throw std::invalid_argument("state cap excludes every oracle instance");

  // Random continuous joint states: swap acceptance and weight identities.
  Worst alpha_uw = worst_upper(), alpha_pt = worst_upper(), wsum = worst_upper(), what_lo = worst_lower(),
        what_hi = worst_upper(), w_ident = worst_upper();
  for (int s = 0; s < options.random_states; ++s) {
    const int K = 2 + s % 3;
    const auto ladder = random_ladder(K, rng, s % 5 == 4);
    const auto perms = PermutationSet::full(K);
    const Ensemble e = random_ensemble(K, rng);
    const auto uw = [&](const Ensemble& x, const Permutation& sg) { return uw_log_ratio(x, ladder, perms, sg); };
    for (const auto& sigma : perms) alpha_uw.add(std::abs(swap_log_acceptance(e, ladder, sigma, uw)));

    for (int i = 0; i + 1 < K; ++i) {
      const Permutation tau = Permutation::transposition(K, i, i + 1);
      const auto pair_ratio = [&](const Ensemble&, const Permutation& sg) {
        return sg == tau ? 0.0 : -kOutOfDomain;
      };
      alpha_pt.add(std::abs(swap_log_acceptance(e, ladder, tau, pair_ratio) - pt_pair_log_acceptance(e, ladder, i, i + 1)));
    }

    const auto w = wgpt_weights(e, ladder, perms);
    const auto what = is_weights(e, ladder, perms);
    double total = 0.0;
    for (double v : w.probs) total += v;
    wsum.add(std::abs(total - 1.0));
    const double cardinality = static_cast<double>(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) {
      what_lo.add(what[i]);
      what_hi.add(what[i] - cardinality);
      w_ident.add(std::abs(w.probs[i] - what[perms.inverse_index(i)] / cardinality));
    }
  }

  // Simulation cross-check of the palindromic UGPT step on a 2 x 2 space.
  const DiscreteSpace small({0.0, 1.3}, TemperatureLadder({1.0, 0.4}), options.cap);
  const auto sim = simulate_ugpt_row(small, PermutationSet::full(2), 1, options.sim_draws, options.seed);
  Worst sim_z = worst_upper();
  sim_z.add(sim.support_ok ? sim.max_z : std::numeric_limits<double>::infinity());

  return {
      row("base MH detailed balance residual", base_rev, 1e-12),
      row("unweighted swap kernel detailed balance residual", uw_rev, 1e-12),
      row("palindromic UGPT kernel detailed balance residual", ugpt_rev, 1e-12),
      row("WGPT kernel detailed balance residual (mu_W)", wgpt_rev, 1e-12),
      row("reversible PT kernel detailed balance residual", rpt_rev, 1e-12),
      row("PSDPT swap kernel detailed balance residual", psdpt_rev, 1e-12),
      row("plain PT sweep residual (expected > 0)", Worst{sweep_rev.value, false}, 1e-8),
      row("row-sum error of all kernels", rows, 1e-12),
      row("unweighted swap invariance l1 residual", uw_inv, 1e-12),
      row("WGPT stationary distribution vs mu_W (l1)", wgpt_stat, 1e-10),
      row("UGPT stationary distribution vs mu (l1)", ugpt_stat, 1e-10),
      row("UGPT gap minus product gap (min)", gap_gain, -1e-12),
      row("unweighted swap |log alpha| at random states", alpha_uw, 1e-12),
      row("generic acceptance vs pairwise PT formula", alpha_pt, 1e-12),
      row("|sum of swapping weights - 1|", wsum, 1e-12),
      row("importance weight minimum", what_lo, 0.0),
      row("importance weight maximum minus |S|", what_hi, 0.0),
      row("|w(sigma) - w_hat(sigma^-1)/|S||", w_ident, 1e-12),
      row("variance lower-bound slack (min)", var_slack, -1e-10),
      row("average variance upper bound (max, <= 1)", var_upper, 1.0 + 1e-10),
      row("WGPT gap-bound slack (min)", gap_slack, -1e-10),
      row("WGPT gap-bound slack with identity kernels (min)", gap_slack_id, -1e-10),
      row("weighted estimator exactness error", est_err, 1e-10),
      row("UGPT simulation vs matrix row (max z)", sim_z, 3.0),
  };
}

}  // namespace gpt::verify
