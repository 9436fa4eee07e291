#include "gpt/targets.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gpt/rng.hpp"

namespace gpt {

// ---------------------------------------------------------------------------
// DataSet IO

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void write_dataset(const DataSet& data, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path.string());
  out << "receiver_or_row";
  for (Eigen::Index j = 0; j < data.observations.cols(); ++j) out << ",v" << j + 1;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.observations.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < data.observations.cols(); ++j) out << ',' << data.observations(i, j);
    out << '\n';
  }

  nlohmann::json meta{{"seed", data.seed}, {"noise_sd", data.noise_sd}, {"target_name", data.target_name}};
  std::ofstream side(sidecar_path(csv_path));
  if (!side) throw std::runtime_error("cannot write " + sidecar_path(csv_path).string());
  side << std::setprecision(17) << meta.dump(2) << '\n';
}

DataSet read_dataset(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("receiver_or_row", 0) != 0) throw std::runtime_error(csv_path.string() + ": bad header");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(csv_path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }

  DataSet data;
  data.observations.resize(static_cast<Eigen::Index>(rows.size()),
                           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.observations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

  std::ifstream side(sidecar_path(csv_path));
  if (!side) throw std::runtime_error("missing sidecar " + sidecar_path(csv_path).string());
  const auto meta = nlohmann::json::parse(side);
  data.seed = meta.at("seed").get<std::uint64_t>();
  data.noise_sd = meta.at("noise_sd").get<double>();
  data.target_name = meta.at("target_name").get<std::string>();
  return data;
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& clean, double sd, std::uint64_t seed) {
  Eigen::MatrixXd noisy = clean;
  if (sd == 0.0) return noisy;
  auto rng = RandomStream::derive(seed, 0, StreamTag::data);
  for (Eigen::Index i = 0; i < noisy.rows(); ++i)
    for (Eigen::Index j = 0; j < noisy.cols(); ++j) noisy(i, j) += sd * rng.normal();
  return noisy;
}

// ---------------------------------------------------------------------------
// Circle

CircleTarget::CircleTarget() : BoxPriorTarget(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0)) {}

double CircleTarget::potential(const ParamVector& theta) const {
  if (!in_domain(theta)) return kOutOfDomain;
  const double d = theta.squaredNorm() - kRadius * kRadius;
  return kScale * d * d;
}

std::shared_ptr<const TargetModel> circle_target() { return std::make_shared<CircleTarget>(); }

double circle_posterior_mean(int n) {
  if (n < 2 || n % 2) throw std::invalid_argument("Simpson rule needs an even panel count");
  // The density vanishes (exp(-1296) underflows) long before r = 1, so the
  // quarter disc of radius 1 carries all the mass of [0,1]^2.
  const double h = 1.0 / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double d = r * r - CircleTarget::kRadius * CircleTarget::kRadius;
    const double rho = std::exp(-CircleTarget::kScale * d * d);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    num += w * r * r * rho;
    den += w * r * rho;
  }
  return 2.0 / std::numbers::pi * num / den;
}

Eigen::MatrixXd circle_tempered_histogram(double beta, int bins, int sub) {
  const CircleTarget target;
  Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(bins, bins);
  const int n = bins * sub;
  const double h = 1.0 / n;
  std::vector<double> logd;
  logd.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      logd.push_back(-beta * target.potential(Eigen::Vector2d((i + 0.5) * h, (j + 0.5) * h)));
  const double lse = log_sum_exp(logd);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hist(i / sub, j / sub) += std::exp(logd[static_cast<std::size_t>(i) * n + j] - lse);
  return hist;
}

// ---------------------------------------------------------------------------
// Elliptic

EllipticTarget::EllipticTarget(DataSet data, std::shared_ptr<const PoissonSolver> solver, double eta)
    : BoxPriorTarget(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0)),
      data_(std::move(data)),
      solver_(std::move(solver)),
      obs_(solver_->grid_n(), static_cast<int>(data_.observations.rows())),
      eta_(eta) {
  if (data_.observations.rows() != data_.observations.cols() || data_.observations.rows() == 0)
    throw std::invalid_argument("elliptic data must be a non-empty square lattice");
  if (!(eta_ > 0.0)) throw std::invalid_argument("elliptic noise level must be positive");
}

Eigen::MatrixXd EllipticTarget::forward(const ParamVector& theta) const {
  return poisson_forward(Eigen::Vector2d(theta[0], theta[1]), *solver_, obs_);
}

double EllipticTarget::misfit(const Eigen::MatrixXd& residual) const {
  const double s = static_cast<double>(residual.rows()) * eta_;
  return 0.5 * residual.squaredNorm() / (s * s);
}

double EllipticTarget::potential(const ParamVector& theta) const {
  if (!in_domain(theta)) return kOutOfDomain;
  return misfit(data_.observations - forward(theta));
}

Eigen::MatrixXd elliptic_clean_data(const PoissonSolver& solver, int lattice) {
  const int n = solver.grid_n();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (double c1 : {0.2, 0.8})
    for (double c2 : {0.2, 0.8}) f += gaussian_source(n, c1, c2);
  return LatticeInterpolator(n, lattice).apply(solver.solve(f));
}

DataSet gen_data_elliptic(std::uint64_t seed, double noise_sd, int grid_n) {
  const PoissonSolver solver(grid_n);
  return DataSet{"elliptic", add_noise(elliptic_clean_data(solver), noise_sd, seed), noise_sd, seed};
}

std::shared_ptr<const TargetModel> elliptic_target(const DataSet& data, int grid_n) {
  if (data.observations.rows() != kEllipticLattice || data.observations.cols() != kEllipticLattice)
    throw std::invalid_argument("elliptic data must be 64 x 64");
  return std::make_shared<EllipticTarget>(data, std::make_shared<PoissonSolver>(grid_n));
}

// ---------------------------------------------------------------------------
// Wave 1-D

namespace {

constexpr double kPulseSharpness = 100.0;
constexpr double kWaveDt = 5.0 / kWaveTimes;
// exp(-x) is exactly zero in double precision for x beyond ~745.2.
constexpr double kUnderflow = 750.0;
// Receivers sit every 200 time steps, so every x -+ t is -5 + m dt for an integer m.
constexpr int kStepsPerReceiver = 200;
constexpr int kOffsetSteps = 100;  // 0.5 / dt
constexpr int kLatticeMin = -kWaveTimes - kOffsetSteps;
constexpr int kLatticeMax = (kWaveReceivers - 1) * kStepsPerReceiver + kWaveTimes + kOffsetSteps;

double single_gaussian(double x) {
  const double e = kPulseSharpness * x * x;
  return e > kUnderflow ? 0.0 : std::exp(-e);
}

}  // namespace

double wave_pulse(double x, double theta) {
  return single_gaussian(x - theta + 0.5) + single_gaussian(x - theta) + single_gaussian(x - theta - 0.5);
}

double wave_receiver(int i) { return -5.0 + i; }
double wave_time(int j) { return kWaveDt * j; }

Eigen::MatrixXd wave1d_forward(double theta) {
  if (!(theta >= -5.0 && theta <= 5.0)) throw std::domain_error("wave source outside [-5,5]");
  Eigen::MatrixXd u(kWaveReceivers, kWaveTimes);
  for (int i = 0; i < kWaveReceivers; ++i) {
    const double x = wave_receiver(i);
    for (int j = 0; j < kWaveTimes; ++j) {
      const double t = wave_time(j + 1);
      u(i, j) = 0.5 * (wave_pulse(x - t, theta) + wave_pulse(x + t, theta));
    }
  }
  return u;
}

Wave1dTarget::Wave1dTarget(DataSet data, double eta)
    : BoxPriorTarget(Eigen::VectorXd::Constant(1, -5.0), Eigen::VectorXd::Constant(1, 5.0)),
      data_(std::move(data)),
      eta_(eta) {
  if (data_.observations.rows() != kWaveReceivers || data_.observations.cols() != kWaveTimes)
    throw std::invalid_argument("wave1d data must be 11 x 1000");
  if (!(eta_ > 0.0)) throw std::invalid_argument("wave1d noise level must be positive");
}

void Wave1dTarget::pulse_table(double theta, std::vector<double>& table) const {
  // g[m] = exp(-100 (-5 + m dt - theta)^2), then table[m] = g[m-100] + g[m] + g[m+100].
  const int lo = kLatticeMin - kOffsetSteps;
  const int hi = kLatticeMax + kOffsetSteps;
  std::vector<double> g(static_cast<std::size_t>(hi - lo + 1), 0.0);
  const double centre = (theta + 5.0) / kWaveDt;
  const double reach = std::sqrt(kUnderflow / kPulseSharpness) / kWaveDt + 1.0;
  const int m0 = std::max(lo, static_cast<int>(std::floor(centre - reach)));
  const int m1 = std::min(hi, static_cast<int>(std::ceil(centre + reach)));
  for (int m = m0; m <= m1; ++m) g[static_cast<std::size_t>(m - lo)] = single_gaussian(-5.0 + m * kWaveDt - theta);

  table.assign(static_cast<std::size_t>(kLatticeMax - kLatticeMin + 1), 0.0);
  for (int m = kLatticeMin; m <= kLatticeMax; ++m) {
    const auto at = [&](int q) { return g[static_cast<std::size_t>(q - lo)]; };
    table[static_cast<std::size_t>(m - kLatticeMin)] = at(m + kOffsetSteps) + at(m) + at(m - kOffsetSteps);
  }
}

Eigen::MatrixXd Wave1dTarget::forward(double theta) const {
  std::vector<double> table;
  pulse_table(theta, table);
  Eigen::MatrixXd u(kWaveReceivers, kWaveTimes);
  for (int i = 0; i < kWaveReceivers; ++i)
    for (int j = 0; j < kWaveTimes; ++j) {
      const int base = i * kStepsPerReceiver - kLatticeMin;
      u(i, j) = 0.5 * (table[static_cast<std::size_t>(base - (j + 1))] + table[static_cast<std::size_t>(base + j + 1)]);
    }
  return u;
}

double Wave1dTarget::misfit(const Eigen::MatrixXd& residual) const {
  const double s2 = kWaveReceivers * eta_ * eta_;
  return 0.5 * residual.squaredNorm() / s2;
}

double Wave1dTarget::potential(const ParamVector& theta) const {
  if (!in_domain(theta)) return kOutOfDomain;
  return misfit(data_.observations - forward(theta[0]));
}

Eigen::MatrixXd wave1d_clean_data() {
  Eigen::MatrixXd a = wave1d_forward(-3.0);
  Eigen::MatrixXd b = wave1d_forward(3.0);
  return 0.5 * (a + b);
}

DataSet gen_data_wave1d(std::uint64_t seed, double noise_sd) {
  return DataSet{"wave1d", add_noise(wave1d_clean_data(), noise_sd, seed), noise_sd, seed};
}

std::shared_ptr<const TargetModel> wave1d_target(const DataSet& data) {
  return std::make_shared<Wave1dTarget>(data);
}

double wave1d_posterior_mean(const TargetModel& target, int points) {
  if (points < 3) throw std::invalid_argument("quadrature needs at least 3 points");
  const double h = 10.0 / (points - 1);
  std::vector<double> logw(static_cast<std::size_t>(points));
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    x[static_cast<std::size_t>(i)] = i == points - 1 ? 5.0 : -5.0 + i * h;
    const double edge = (i == 0 || i == points - 1) ? std::log(0.5) : 0.0;
    logw[static_cast<std::size_t>(i)] =
        edge + tempered_log_density(1.0, target.potential(ParamVector::Constant(1, x[static_cast<std::size_t>(i)])));
  }
  const double lse = log_sum_exp(logw);
  double mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += x[i] * std::exp(logw[i] - lse);
  return mean;
}

// ---------------------------------------------------------------------------
// Gaussian field

GaussFieldTarget::GaussFieldTarget(int d, std::vector<ParamVector> modes, double mode_sd)
    : d_(d), modes_(std::move(modes)), mode_sd_(mode_sd), scale_(Eigen::VectorXd::Ones(d)) {
  if (d < 2) throw std::invalid_argument("gaussfield needs d >= 2");
  if (modes_.empty()) throw std::invalid_argument("gaussfield needs at least one mode");
  if (!(mode_sd_ > 0.0)) throw std::invalid_argument("gaussfield mode width must be positive");
  for (std::size_t a = 0; a < modes_.size(); ++a) {
    if (modes_[a].size() != d) throw std::invalid_argument("gaussfield mode has wrong dimension");
    for (std::size_t b = 0; b < a; ++b)
      if (modes_[a] == modes_[b]) throw std::invalid_argument("gaussfield modes must be distinct");
  }
}

bool GaussFieldTarget::in_domain(const ParamVector& theta) const {
  return theta.size() == d_ && theta.allFinite();
}

double GaussFieldTarget::potential(const ParamVector& theta) const {
  if (!in_domain(theta)) return kOutOfDomain;
  std::vector<double> terms;
  terms.reserve(modes_.size());
  for (const auto& m : modes_) terms.push_back(-(theta - m).squaredNorm() / (2.0 * mode_sd_ * mode_sd_));
  return -log_sum_exp(terms);
}

double GaussFieldTarget::log_prior(const ParamVector& theta) const {
  if (!in_domain(theta)) return -kOutOfDomain;
  return -0.5 * theta.squaredNorm();
}

ParamVector GaussFieldTarget::sample_prior(RandomStream& rng) const {
  ParamVector theta(d_);
  for (int i = 0; i < d_; ++i) theta[i] = rng.normal();
  return theta;
}

std::vector<Qoi> GaussFieldTarget::qois() const {
  return {Qoi{"theta1", [](const ParamVector& t) { return t[0]; }},
          Qoi{"norm2", [](const ParamVector& t) { return t.squaredNorm(); }}};
}

std::shared_ptr<const TargetModel> gaussfield_target(int d, std::vector<ParamVector> modes, double mode_sd) {
  return std::make_shared<GaussFieldTarget>(d, std::move(modes), mode_sd);
}

}  // namespace gpt
