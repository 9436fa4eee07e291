#ifndef GPT_POISSON_HPP
#define GPT_POISSON_HPP

#include <functional>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace gpt {

/**
 * Five-point finite-difference solver for Delta u = f on the unit square with
 * u = 0 on the boundary.
 *
 * Grid functions live on the (n+1) x (n+1) node grid, entry (i, j) at
 * (x1, x2) = (i h, j h), h = 1/n. The sparse matrix of -Delta_h on the
 * interior nodes is factorized once at construction and reused by every solve,
 * so one instance can be shared read-only between threads.
 */
class PoissonSolver {
 public:
  explicit PoissonSolver(int grid_n);

  int grid_n() const { return n_; }
  double h() const { return 1.0 / n_; }

  /// Solution on the node grid; boundary entries of `f` are ignored.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& f) const;
  Eigen::MatrixXd solve(const std::function<double(double, double)>& f) const;

  /// Infinity norm of Delta_h u - f over interior nodes.
  double residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& f) const;

 private:
  int n_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/**
 * Bilinear interpolation from the solver node grid onto the interior lattice
 * (i/(L+1), j/(L+1)), i, j = 1..L. Separable, so it is stored as one dense
 * L x (n+1) matrix W and applied as W u W^T.
 */
class LatticeInterpolator {
 public:
  LatticeInterpolator(int grid_n, int lattice);

  int lattice() const { return static_cast<int>(w_.rows()); }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& u_nodes) const;

 private:
  Eigen::MatrixXd w_;
};

/// exp(-1000 |x - c|^2) sampled on the node grid, built from its two 1-D factors.
Eigen::MatrixXd gaussian_source(int grid_n, double c1, double c2);

/// Single-source forward map observed on an L x L lattice.
Eigen::MatrixXd poisson_forward(const Eigen::Vector2d& theta, const PoissonSolver& solver,
                                const LatticeInterpolator& obs);
/// Convenience overload: builds a solver with the given grid and a 64 x 64 lattice.
Eigen::MatrixXd poisson_forward(const Eigen::Vector2d& theta, int grid_n);

}  // namespace gpt

#endif  // GPT_POISSON_HPP
