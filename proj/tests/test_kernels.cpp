#include <doctest.h>

#include <cmath>
#include <vector>

#include "gpt/kernels.hpp"
#include "gpt/rng.hpp"
#include "gpt/targets.hpp"

using namespace gpt;

namespace {

// Phi(theta) = theta_1 on [0, 10]; uniform prior.
class LinearTarget final : public BoxPriorTarget {
 public:
  LinearTarget() : BoxPriorTarget(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 10.0)) {}
  std::string name() const override { return "linear"; }
  double potential(const ParamVector& theta) const override { return in_domain(theta) ? theta[0] : kOutOfDomain; }
};

ChainState state_at(double x, const TargetModel& t) { return evaluate_state(ParamVector::Constant(1, x), t, nullptr); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("MH acceptance against hand values") {
  LinearTarget t;
  const auto a = state_at(1.0, t);
  const auto b = state_at(1.0 + std::log(2.0), t);
  CHECK(std::exp(mh_log_acceptance(1.0, a, b)) == doctest::Approx(0.5));
  CHECK(mh_log_acceptance(1.0, b, a) == 0.0);
  CHECK(std::exp(mh_log_acceptance(0.5, a, state_at(3.0, t))) == doctest::Approx(std::exp(-1.0)));
  CHECK(mh_log_acceptance(0.0, a, state_at(9.0, t)) == 0.0);
  const auto out = state_at(11.0, t);
  CHECK(std::isinf(out.potential));
  CHECK(mh_log_acceptance(0.0, a, out) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("metropolis_accept consumes exactly one draw") {
  RandomStream r(1);
  CHECK(metropolis_accept(0.0, r));
  CHECK_FALSE(metropolis_accept(-std::numeric_limits<double>::infinity(), r));
  CHECK(r.draws() == 2);
}

TEST_CASE("kernel specs validate their steps") {
  CHECK_THROWS_AS(KernelSpec::rwm(0.0).validate(1), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::rwm(0.1, Eigen::VectorXd::Ones(3)).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::pcn(1.5).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::pcn(1.0).validate(2), std::invalid_argument);
  CHECK_NOTHROW(KernelSpec::pcn(0.99).validate(2));
  CHECK(parse_kernel_kind(to_string(KernelKind::pcn)) == KernelKind::pcn);
  CHECK_THROWS(parse_kernel_kind("mala"));
}

TEST_CASE("rwm replays: proposal and decision from a copied stream") {
  LinearTarget t;
  const auto spec = KernelSpec::rwm(0.7);
  RandomStream rng = RandomStream::derive(3, 1, 0);
  ChainState cur = state_at(2.0, t);
  for (int i = 0; i < 200; ++i) {
    RandomStream replay = rng;
    const double prop = cur.theta[0] + 0.7 * replay.normal();
    const double u = replay.uniform();
    const bool inside = prop >= 0.0 && prop <= 10.0;
    const bool expect = inside && std::log(u) < -(prop - cur.theta[0]);
    const auto r = rwm_step(cur, 1.0, t, spec, rng);
    CHECK(r.accepted == expect);
    CHECK(r.evaluated == inside);
    CHECK(r.state.theta[0] == (expect ? prop : cur.theta[0]));
    cur = r.state;
  }
}

TEST_CASE("pcn acceptance uses the likelihood ratio only") {
  // Single mode at the origin with unit width: Phi = |theta|^2 / 2 + const.
  auto t = gaussfield_target(2, {ParamVector::Zero(2)}, 1.0);
  const auto spec = KernelSpec::pcn(0.4);
  RandomStream rng = RandomStream::derive(5, 1, 0);
  ChainState cur = evaluate_state(ParamVector::Constant(2, 0.3), *t, nullptr);
  for (int i = 0; i < 200; ++i) {
    RandomStream replay = rng;
    ParamVector prop(2);
    for (int j = 0; j < 2; ++j) prop[j] = std::sqrt(1.0 - 0.16) * cur.theta[j] + 0.4 * replay.normal();
    const double u = replay.uniform();
    const double dphi = 0.5 * (prop.squaredNorm() - cur.theta.squaredNorm());
    const auto r = pcn_step(cur, 1.0, *t, spec, rng);
    CHECK(r.accepted == (std::log(u) < -dphi));
    cur = r.state;
  }
  // Hand value: a likelihood increase of one unit is accepted with e^-1.
  const auto a = evaluate_state(ParamVector::Zero(2), *t, nullptr);
  ParamVector y(2);
  y << std::sqrt(2.0), 0.0;
  const auto b = evaluate_state(y, *t, nullptr);
  CHECK(b.potential - a.potential == doctest::Approx(1.0));
  CHECK_THROWS_AS(pcn_step(a, 1.0, *circle_target(), spec, rng), std::invalid_argument);
}

TEST_CASE("rwm and pcn sample a known Gaussian posterior") {
  // Prior N(0, I) times exp(-|theta|^2 / 2) is N(0, I/2).
  auto t = gaussfield_target(2, {ParamVector::Zero(2)}, 1.0);
  for (const auto& spec : {KernelSpec::rwm(0.9), KernelSpec::pcn(0.6)}) {
    RandomStream rng = RandomStream::derive(21, 0, 0);
    ChainState cur = evaluate_state(ParamVector::Zero(2), *t, nullptr);
    const int n = 200000, thin = 5;
    double s = 0, ss = 0;
    int m = 0;
    for (int i = 0; i < n; ++i) {
      cur = kernel_step(cur, 1.0, *t, spec, rng).state;
      if (i % thin == 0) {
        s += cur.theta[0];
        ss += cur.theta[0] * cur.theta[0];
        ++m;
      }
    }
    CHECK(std::abs(s / m) < 0.03);
    CHECK(ss / m == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("a warm circle chain matches its tempered histogram") {
  const double beta = 1.0 / 5000.0;
  const int bins = 8, thin = 25, kept = 20000;
  const auto exact = circle_tempered_histogram(beta, bins, 16);
  auto t = circle_target();
  const auto spec = KernelSpec::rwm(0.65);
  RandomStream rng = RandomStream::derive(8, 0, 0);
  ChainState cur = evaluate_state(ParamVector::Constant(2, 0.5), *t, nullptr);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(bins, bins);
  for (int i = 0; i < 1000; ++i) cur = rwm_step(cur, beta, *t, spec, rng).state;
  for (int n = 0; n < kept; ++n) {
    for (int i = 0; i < thin; ++i) cur = rwm_step(cur, beta, *t, spec, rng).state;
    const int a = std::min(bins - 1, static_cast<int>(cur.theta[0] * bins));
    const int b = std::min(bins - 1, static_cast<int>(cur.theta[1] * bins));
    counts(a, b) += 1;
  }
  double chi2 = 0;
  for (int a = 0; a < bins; ++a)
    for (int b = 0; b < bins; ++b) {
      const double e = exact(a, b) * kept;
      chi2 += (counts(a, b) - e) * (counts(a, b) - e) / e;
    }
  // 63 degrees of freedom; 99.9% quantile is about 103.
  CHECK(chi2 < 103.0);
}

TEST_CASE("product step: chain k uses its own stream and the dynamics of sigma(k)") {
  auto t = circle_target();
  const auto ladder = build_ladder(4.0, 3);
  const std::vector<KernelSpec> specs{KernelSpec::rwm(0.05), KernelSpec::rwm(0.1), KernelSpec::rwm(0.2)};
  RandomStream init(1);
  std::vector<ParamVector> xs;
  for (int k = 0; k < 3; ++k) xs.push_back(t->sample_prior(init));
  const auto e = Ensemble::evaluate(xs, *t);

  std::vector<RandomStream> r1{RandomStream(10), RandomStream(11), RandomStream(12)};
  std::vector<RandomStream> r2{RandomStream(10), RandomStream(99), RandomStream(12)};
  StepStats s1(3);
  const auto a = product_step(e, ladder, specs, *t, r1, &s1);
  const auto b = product_step(e, ladder, specs, *t, r2);
  CHECK(a.state(0) == b.state(0));
  CHECK(a.state(2) == b.state(2));
  CHECK(s1.evaluations <= 3);
  CHECK(s1.proposed == std::vector<std::uint64_t>{1, 1, 1});
  CHECK(a.is_coherent(*t));

  const auto sigma = Permutation::from_one_based({3, 1, 2});
  StepStats s2(3);
  std::vector<RandomStream> r3{RandomStream(10), RandomStream(11), RandomStream(12)};
  const auto c = product_step(e, ladder, specs, *t, r3, &s2, &sigma);
  CHECK(s2.last_dynamics == std::vector<int>{2, 0, 1});
  // Same stream, different step size: chain 1 now moves with rho_3.
  RandomStream replay(10);
  const auto expect = rwm_step(e.chain(0), ladder.beta(2), *t, specs[2], replay);
  CHECK(c.state(0) == expect.state.theta);
}

}
