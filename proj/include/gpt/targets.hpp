#ifndef GPT_TARGETS_HPP
#define GPT_TARGETS_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpt/poisson.hpp"
#include "gpt/target.hpp"

namespace gpt {

/// Synthetic observations y = F(theta_true) + noise.
struct DataSet {
  std::string target_name;
  Eigen::MatrixXd observations;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

/// Writes `csv_path` (header receiver_or_row,v1..vn) and a JSON sidecar next to it.
void write_dataset(const DataSet& data, const std::filesystem::path& csv_path);
DataSet read_dataset(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Adds i.i.d. N(0, sd^2) noise from the data stream keyed by `seed`.
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& clean, double sd, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Quarter-circle manifold on [0,1]^2.

class CircleTarget final : public BoxPriorTarget {
 public:
  static constexpr double kScale = 10000.0;
  static constexpr double kRadius = 0.8;

  CircleTarget();
  std::string name() const override { return "circle"; }
  double potential(const ParamVector& theta) const override;
};

std::shared_ptr<const TargetModel> circle_target();

/// E[theta_1] (= E[theta_2] by symmetry) of the circle posterior, computed in
/// polar coordinates by composite Simpson on `n` radial panels.
double circle_posterior_mean(int n = 200000);

/// Density of exp(-beta Phi) for the circle target on a uniform grid of cell
/// centres in [0,1]^2, normalized to probabilities. Row index = theta_1 bin.
Eigen::MatrixXd circle_tempered_histogram(double beta, int bins, int sub = 8);

// ---------------------------------------------------------------------------
// Single-source elliptic inverse problem.

inline constexpr double kEllipticNoise = 3.2e-6;
inline constexpr int kEllipticLattice = 64;
inline constexpr int kEllipticGrid = 64;

class EllipticTarget final : public BoxPriorTarget {
 public:
  EllipticTarget(DataSet data, std::shared_ptr<const PoissonSolver> solver, double eta = kEllipticNoise);

  std::string name() const override { return "elliptic"; }
  double potential(const ParamVector& theta) const override;
  Eigen::MatrixXd forward(const ParamVector& theta) const;
  /// (1/2) (L eta)^-2 ||residual||_F^2 for an L x L residual.
  double misfit(const Eigen::MatrixXd& residual) const;

  const DataSet& data() const { return data_; }

 private:
  DataSet data_;
  std::shared_ptr<const PoissonSolver> solver_;
  LatticeInterpolator obs_;
  double eta_;
};

/// Noiseless data from the four sources at (0.2|0.8, 0.2|0.8).
Eigen::MatrixXd elliptic_clean_data(const PoissonSolver& solver, int lattice = kEllipticLattice);
DataSet gen_data_elliptic(std::uint64_t seed, double noise_sd = kEllipticNoise, int grid_n = kEllipticGrid);
std::shared_ptr<const TargetModel> elliptic_target(const DataSet& data, int grid_n = kEllipticGrid);

// ---------------------------------------------------------------------------
// 1-D wave source inversion.

inline constexpr int kWaveReceivers = 11;
inline constexpr int kWaveTimes = 1000;
inline constexpr double kWaveNoise = 0.01;

/// Triple-Gaussian pulse sum_{c in {-0.5,0,0.5}} exp(-100 (x - theta - c)^2).
double wave_pulse(double x, double theta);
double wave_receiver(int i);
double wave_time(int j);

/// Direct d'Alembert evaluation at the 11 x 1000 receiver/time lattice.
Eigen::MatrixXd wave1d_forward(double theta);

class Wave1dTarget final : public BoxPriorTarget {
 public:
  explicit Wave1dTarget(DataSet data, double eta = kWaveNoise);

  std::string name() const override { return "wave1d"; }
  double potential(const ParamVector& theta) const override;
  /// Same values as wave1d_forward, assembled from one shared pulse table.
  Eigen::MatrixXd forward(double theta) const;
  double misfit(const Eigen::MatrixXd& residual) const;

  const DataSet& data() const { return data_; }

 private:
  void pulse_table(double theta, std::vector<double>& table) const;

  DataSet data_;
  double eta_;
};

/// Data from the two-pulse initial condition centred at -3 and 3.
Eigen::MatrixXd wave1d_clean_data();
DataSet gen_data_wave1d(std::uint64_t seed, double noise_sd = kWaveNoise);
std::shared_ptr<const TargetModel> wave1d_target(const DataSet& data);

/// Posterior mean of theta by the trapezoid rule on `points` nodes of [-5,5].
double wave1d_posterior_mean(const TargetModel& target, int points);

// ---------------------------------------------------------------------------
// Gaussian-mixture likelihood under a standard normal prior (pCN test bed).

class GaussFieldTarget final : public TargetModel {
 public:
  GaussFieldTarget(int d, std::vector<ParamVector> modes, double mode_sd = 1.0);

  std::string name() const override { return "gaussfield"; }
  int dim() const override { return d_; }
  bool in_domain(const ParamVector& theta) const override;
  double potential(const ParamVector& theta) const override;
  double log_prior(const ParamVector& theta) const override;
  ParamVector sample_prior(RandomStream& rng) const override;
  /// theta_1 and |theta|^2.
  std::vector<Qoi> qois() const override;
  const Eigen::VectorXd* normal_prior_scale() const override { return &scale_; }

 private:
  int d_;
  std::vector<ParamVector> modes_;
  double mode_sd_;
  Eigen::VectorXd scale_;
};

std::shared_ptr<const TargetModel> gaussfield_target(int d, std::vector<ParamVector> modes,
                                                     double mode_sd = 1.0);

}  // namespace gpt

#endif  // GPT_TARGETS_HPP
