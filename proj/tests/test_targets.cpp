#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpt/poisson.hpp"
#include "gpt/rng.hpp"
#include "gpt/targets.hpp"

using namespace gpt;

namespace {

ParamVector vec(double a) { return ParamVector::Constant(1, a); }
ParamVector vec(double a, double b) {
  ParamVector v(2);
  v << a, b;
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Independent Cartesian midpoint rule for E[theta_1] of the circle posterior.
double circle_mean_cartesian(int n) {
  double z = 0, m = 0;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = (j + 0.5) * h;
      const double r2 = x * x + y * y - 0.64;
      const double p = std::exp(-1e4 * r2 * r2);
      z += p;
      m += x * p;
    }
  }
  return m / z;
}

}  // namespace

TEST_SUITE("targets") {

TEST_CASE("circle potential values") {
  auto t = circle_target();
  CHECK(t->potential(vec(0.8, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t->potential(vec(0.0, 0.0)) == doctest::Approx(4096.0));
  CHECK(std::isinf(t->potential(vec(1.1, 0.2))));
  CHECK(std::isinf(t->log_prior(vec(-0.1, 0.2))));
  CHECK(t->log_prior(vec(0.3, 0.2)) == 0.0);
}

TEST_CASE("circle posterior mean: polar Simpson vs Cartesian midpoint") {
  const double polar = circle_posterior_mean();
  CHECK(polar == doctest::Approx(circle_mean_cartesian(4000)).epsilon(2e-5));
  CHECK(polar == doctest::Approx(0.50929).epsilon(1e-4));
}

TEST_CASE("circle tempered histogram is a probability table") {
  const auto h = circle_tempered_histogram(1.0 / 17.1, 10);
  CHECK(h.sum() == doctest::Approx(1.0));
  CHECK(h.minCoeff() >= 0.0);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Poisson solver: residual, symmetry and second-order convergence") {
  const double pi = std::acos(-1.0);
  const auto exact = [&](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  double prev = 0;
  for (int n : {16, 32, 64}) {
    PoissonSolver s(n);
    // Laplacian u = -2 pi^2 u for the manufactured solution.
    const auto f = [&](double x, double y) { return -2.0 * pi * pi * exact(x, y); };
    const auto u = s.solve(f);
    double err = 0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) err = std::max(err, std::abs(u(i, j) - exact(i * s.h(), j * s.h())));
    Eigen::MatrixXd fm(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) fm(i, j) = f(i * s.h(), j * s.h());
    CHECK(s.residual(u, fm) <= 1e-10);
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }

  PoissonSolver s(64);
  const auto u = s.solve(gaussian_source(64, 0.3, 0.6));
  const auto v = s.solve(gaussian_source(64, 0.6, 0.3));
  CHECK((u - v.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(u.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(PoissonSolver(4), std::invalid_argument);
}

TEST_CASE("lattice interpolation reproduces bilinear functions") {
  LatticeInterpolator w(32, 64);
  Eigen::MatrixXd u(33, 33);
  for (int i = 0; i <= 32; ++i)
    for (int j = 0; j <= 32; ++j) u(i, j) = 1.0 + 2.0 * i / 32.0 - 3.0 * j / 32.0 + (i / 32.0) * (j / 32.0);
  const auto y = w.apply(u);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const double x1 = (i + 1) / 65.0, x2 = (j + 1) / 65.0;
      CHECK(y(i, j) == doctest::Approx(1.0 + 2.0 * x1 - 3.0 * x2 + x1 * x2).epsilon(1e-12));
    }
}

TEST_CASE("elliptic: well-specified data puts the minimum at the source") {
  PoissonSolver solver(64);
  DataSet d{"elliptic", poisson_forward(Eigen::Vector2d(0.3, 0.7), solver, LatticeInterpolator(64, kEllipticLattice)), 0.0, 0};
  const EllipticTarget t(d, std::make_shared<const PoissonSolver>(64));
  const double at_truth = t.potential(vec(0.3, 0.7));
  CHECK(at_truth == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) CHECK(t.potential(vec((i + 0.5) / 32.0, (j + 0.5) / 32.0)) >= at_truth);
}

TEST_CASE("elliptic misfit scaling and invariance") {
  const auto d = gen_data_elliptic(1);
  auto solver = std::make_shared<const PoissonSolver>(64);
  const EllipticTarget a(d, solver), b(d, solver, 2.0 * kEllipticNoise);
  RandomStream rng(1);
  for (int i = 0; i < 5; ++i) {
    const auto th = a.sample_prior(rng);
    CHECK(b.potential(th) == doctest::Approx(a.potential(th) / 4.0).epsilon(1e-12));
    CHECK(a.potential(th) >= 0.0);
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(64, 64);
  Eigen::MatrixXd p = r.rowwise().reverse();
  CHECK(a.misfit(p) == doctest::Approx(a.misfit(r)).epsilon(1e-14));
  CHECK(d.observations.rows() == 64);
  CHECK(d.observations.cols() == 64);
  CHECK(std::isinf(a.potential(vec(1.2, 0.5))));
}

TEST_CASE("wave: d'Alembert identities") {
  CHECK(wave_pulse(0.0, 0.0) == doctest::Approx(1.0 + 2.0 * std::exp(-25.0)));
  const auto f0 = wave1d_forward(0.0);
  const auto f1 = wave1d_forward(1.0);
  // Translation: receiver x at source 1 sees what receiver x - 1 sees at source 0.
  for (int i = 1; i < kWaveReceivers; ++i)
    CHECK((f1.row(i) - f0.row(i - 1)).cwiseAbs().maxCoeff() < 1e-15);
  // Direct formula at one lattice point.
  const double x = wave_receiver(4), tt = wave_time(200);
  CHECK(f0(4, 199) == doctest::Approx(0.5 * (wave_pulse(x - tt, 0.0) + wave_pulse(x + tt, 0.0))));
  CHECK(wave_time(1000) == doctest::Approx(5.0));
  CHECK_THROWS_AS(wave1d_forward(5.5), std::domain_error);
}

TEST_CASE("wave: fast forward equals direct evaluation") {
  const auto d = gen_data_wave1d(1);
  const Wave1dTarget t(d);
  RandomStream rng(2);
  for (int i = 0; i < 20; ++i) {
    const double th = -5.0 + 10.0 * rng.uniform();
    CHECK((t.forward(th) - wave1d_forward(th)).cwiseAbs().maxCoeff() < 1e-13);
  }
  for (double th : {-5.0, 5.0, 0.0}) CHECK((t.forward(th) - wave1d_forward(th)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("wave: potential landscape") {
  const Wave1dTarget t(gen_data_wave1d(1));
  std::vector<double> phi;
  for (int i = 0; i <= 2000; ++i) phi.push_back(t.potential(vec(-5.0 + 0.005 * i)));
  for (double p : phi) CHECK(p >= 0.0);
  std::vector<std::pair<double, int>> minima;
  for (int i = 1; i < 2000; ++i)
    if (phi[i] < phi[i - 1] && phi[i] < phi[i + 1]) minima.emplace_back(phi[i], i);
  std::sort(minima.begin(), minima.end());
  REQUIRE(minima.size() >= 2);
  const double a = -5.0 + 0.005 * minima[0].second, b = -5.0 + 0.005 * minima[1].second;
  CHECK(std::min(std::abs(a - 3.0), std::abs(a + 3.0)) < 0.02);
  CHECK(std::min(std::abs(b - 3.0), std::abs(b + 3.0)) < 0.02);
  CHECK(a * b < 0.0);
}

TEST_CASE("wave: posterior mean quadrature") {
  // Noise-free data are mirror symmetric, so the mean vanishes.
  const Wave1dTarget sym(gen_data_wave1d(1, 0.0));
  CHECK(std::abs(wave1d_posterior_mean(sym, 4001)) < 1e-9);
  const Wave1dTarget t(gen_data_wave1d(1));
  const double coarse = wave1d_posterior_mean(t, 4001), fine = wave1d_posterior_mean(t, 200001);
  CHECK(std::abs(coarse - fine) < 2e-3);
}

TEST_CASE("data sets: determinism, zero noise and file round trip") {
  const auto a = gen_data_wave1d(7), b = gen_data_wave1d(7), c = gen_data_wave1d(8);
  CHECK(a.observations == b.observations);
  CHECK(a.observations != c.observations);
  CHECK(gen_data_wave1d(7, 0.0).observations == wave1d_clean_data());

  const auto dir = std::filesystem::temp_directory_path() / "gpt_test_data";
  std::filesystem::create_directories(dir);
  write_dataset(a, dir / "w1.csv");
  write_dataset(b, dir / "w2.csv");
  CHECK(slurp(dir / "w1.csv") == slurp(dir / "w2.csv"));
  const auto r = read_dataset(dir / "w1.csv");
  CHECK(r.observations == a.observations);
  CHECK(r.target_name == "wave1d");
  CHECK(r.seed == 7);
  CHECK(r.noise_sd == a.noise_sd);
  CHECK(std::filesystem::exists(sidecar_path(dir / "w1.csv")));
  std::filesystem::remove_all(dir);
}

TEST_CASE("gaussfield potential and prior") {
  auto one = gaussfield_target(3, {ParamVector::Zero(3)});
  const ParamVector x = ParamVector::LinSpaced(3, 0.1, 0.7);
  const ParamVector y = ParamVector::LinSpaced(3, -0.4, 0.2);
  CHECK(one->potential(x) - one->potential(y) ==
        doctest::Approx(0.5 * (x.squaredNorm() - y.squaredNorm())).epsilon(1e-12));
  CHECK(one->log_prior(x) - one->log_prior(y) ==
        doctest::Approx(-0.5 * (x.squaredNorm() - y.squaredNorm())).epsilon(1e-12));
  REQUIRE(one->normal_prior_scale());
  CHECK(one->normal_prior_scale()->size() == 3);

  ParamVector m = ParamVector::Zero(3);
  m[0] = 2.0;
  auto two = gaussfield_target(3, {m, -m});
  CHECK(two->potential(x) == doctest::Approx(two->potential(-x)));
  CHECK(two->qois().size() == 2);
  CHECK_THROWS(gaussfield_target(1, {ParamVector::Zero(1)}));
  CHECK_THROWS(gaussfield_target(3, {m, m}));
}

TEST_CASE("finite log prior implies finite potential") {
  ParamVector m = ParamVector::Zero(4);
  m[1] = 1.5;
  const std::vector<std::shared_ptr<const TargetModel>> targets{
      circle_target(), elliptic_target(gen_data_elliptic(2)), wave1d_target(gen_data_wave1d(2)),
      gaussfield_target(4, {m, -m})};
  RandomStream rng(13);
  for (const auto& t : targets) {
    for (int i = 0; i < 50; ++i) {
      ParamVector x = t->sample_prior(rng);
      if (i % 2) x += ParamVector::Constant(x.size(), 0.3 * rng.normal());
      if (std::isfinite(t->log_prior(x))) {
        CHECK(t->in_domain(x));
        CHECK(std::isfinite(t->potential(x)));
      } else {
        CHECK(std::isinf(t->potential(x)));
      }
    }
  }
}

}
