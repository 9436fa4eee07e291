#include "gpt/poisson.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gpt {

namespace {

constexpr double kSourceSharpness = 1000.0;

}  // namespace

PoissonSolver::PoissonSolver(int grid_n) : n_(grid_n) {
  if (grid_n < 8) throw std::invalid_argument("Poisson grid needs grid_n >= 8");
  const int m = n_ - 1;
  const double inv_h2 = static_cast<double>(n_) * n_;
  auto idx = [m](int i, int j) { return (i - 1) * m + (j - 1); };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * m * m));
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int r = idx(i, j);
      trip.emplace_back(r, r, 4.0 * inv_h2);
      if (i > 1) trip.emplace_back(r, idx(i - 1, j), -inv_h2);
      if (i < m) trip.emplace_back(r, idx(i + 1, j), -inv_h2);
      if (j > 1) trip.emplace_back(r, idx(i, j - 1), -inv_h2);
      if (j < m) trip.emplace_back(r, idx(i, j + 1), -inv_h2);
    }
  }
  Eigen::SparseMatrix<double> a(m * m, m * m);
  a.setFromTriplets(trip.begin(), trip.end());
  ldlt_.compute(a);
  if (ldlt_.info() != Eigen::Success) throw std::runtime_error("Poisson factorization failed");
}

Eigen::MatrixXd PoissonSolver::solve(const Eigen::MatrixXd& f) const {
  if (f.rows() != n_ + 1 || f.cols() != n_ + 1)
    throw std::invalid_argument("forcing must be given on the (n+1)x(n+1) node grid");
  const int m = n_ - 1;
  // -Delta_h u = -f; interior nodes in row-major (i, j) order.
  Eigen::VectorXd rhs(m * m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) rhs[(i - 1) * m + (j - 1)] = -f(i, j);
  const Eigen::VectorXd x = ldlt_.solve(rhs);

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_ + 1, n_ + 1);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) u(i, j) = x[(i - 1) * m + (j - 1)];
  return u;
}

Eigen::MatrixXd PoissonSolver::solve(const std::function<double(double, double)>& f) const {
  Eigen::MatrixXd grid(n_ + 1, n_ + 1);
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; j <= n_; ++j) grid(i, j) = f(i * h(), j * h());
  return solve(grid);
}

double PoissonSolver::residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& f) const {
  const double inv_h2 = static_cast<double>(n_) * n_;
  double worst = 0.0;
  for (int i = 1; i < n_; ++i) {
    for (int j = 1; j < n_; ++j) {
      const double lap = (u(i - 1, j) + u(i + 1, j) + u(i, j - 1) + u(i, j + 1) - 4.0 * u(i, j)) * inv_h2;
      worst = std::max(worst, std::abs(lap - f(i, j)));
    }
  }
  return worst;
}

LatticeInterpolator::LatticeInterpolator(int grid_n, int lattice) {
  if (grid_n < 1 || lattice < 1) throw std::invalid_argument("interpolator needs positive sizes");
  w_ = Eigen::MatrixXd::Zero(lattice, grid_n + 1);
  for (int i = 0; i < lattice; ++i) {
    const double s = static_cast<double>(i + 1) / (lattice + 1) * grid_n;
    int lo = static_cast<int>(std::floor(s));
    if (lo >= grid_n) lo = grid_n - 1;
    const double t = s - lo;
    w_(i, lo) += 1.0 - t;
    w_(i, lo + 1) += t;
  }
}

Eigen::MatrixXd LatticeInterpolator::apply(const Eigen::MatrixXd& u_nodes) const {
  if (u_nodes.rows() != w_.cols() || u_nodes.cols() != w_.cols())
    throw std::invalid_argument("node grid size does not match interpolator");
  return w_ * u_nodes * w_.transpose();
}

Eigen::MatrixXd gaussian_source(int grid_n, double c1, double c2) {
  Eigen::VectorXd g1(grid_n + 1), g2(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i) {
    const double x = static_cast<double>(i) / grid_n;
    g1[i] = std::exp(-kSourceSharpness * (x - c1) * (x - c1));
    g2[i] = std::exp(-kSourceSharpness * (x - c2) * (x - c2));
  }
  return g1 * g2.transpose();
}

Eigen::MatrixXd poisson_forward(const Eigen::Vector2d& theta, const PoissonSolver& solver,
                                const LatticeInterpolator& obs) {
  if (!(theta[0] >= 0.0 && theta[0] <= 1.0 && theta[1] >= 0.0 && theta[1] <= 1.0))
    throw std::domain_error("source location outside [0,1]^2");
  return obs.apply(solver.solve(gaussian_source(solver.grid_n(), theta[0], theta[1])));
}

Eigen::MatrixXd poisson_forward(const Eigen::Vector2d& theta, int grid_n) {
  const PoissonSolver solver(grid_n);
  const LatticeInterpolator obs(grid_n, 64);
  return poisson_forward(theta, solver, obs);
}

}  // namespace gpt
