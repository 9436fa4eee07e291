#ifndef GPT_EXPERIMENT_HPP
#define GPT_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpt/core.hpp"
#include "gpt/estimators.hpp"
#include "gpt/kernels.hpp"
#include "gpt/target.hpp"

namespace gpt {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { rwm, pcn, pt, rpt, psdpt, ugpt, wgpt };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
/// rwm and pcn run a single chain at temperature one.
bool is_tempered(Algorithm a);

struct GaussFieldConfig {
  int dim = 10;
  std::vector<std::vector<double>> modes;
  double mode_sd = 1.0;
};

struct ExperimentConfig {
  std::string target = "circle";
  std::vector<Algorithm> algorithms;

  int K = 4;
  std::vector<double> temperatures;  // explicit ladder, or built from ladder_a
  std::optional<double> ladder_a;

  PermScheme perm_scheme = PermScheme::full;
  int perm_window = 1;
  int full_cap = kDefaultFullCap;
  bool exclude_identity = false;
  std::vector<std::vector<int>> custom_perms;  // 1-based

  KernelKind kernel = KernelKind::rwm;
  std::vector<double> steps;  // rho_1..rho_K
  double base_step = 0.0;     // single-chain rwm / pcn step

  std::size_t N = 25000;
  double burn_frac = 0.2;
  int runs = 20;
  std::uint64_t seed = 1;
  int n_s = 1;
  std::uint64_t data_seed = 1;
  bool cost_parity = true;  // single-chain methods run K times longer
  std::string output_dir = "out";

  std::vector<double> truth;  // per-QoI override
  int grid_n = 64;
  std::string data_file;
  GaussFieldConfig gaussfield;

  TemperatureLadder ladder() const;
  PermutationSet perm_set() const;
  std::size_t iterations(Algorithm a) const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Target, QoIs and reference values for a configuration.
struct Problem {
  std::shared_ptr<const TargetModel> target;
  std::vector<Qoi> qois;
  std::vector<std::optional<double>> truth;
  std::string truth_source;  // quadrature, config or none
};

Problem make_problem(const ExperimentConfig& cfg);

/// One run of one algorithm. Deterministic in (cfg.seed, run).
struct RunOutput {
  RunSummary summary;
  ChainTrace trace;
};

RunOutput run_single(const ExperimentConfig& cfg, const Problem& problem, Algorithm algorithm, int run,
                     bool keep_trace = false);

struct TableRow {
  std::string algorithm;
  std::string qoi;
  std::size_t runs = 0;
  double mean = 0.0;
  double error = 0.0;
  std::string error_kind;  // MSE or Var
  std::optional<double> ratio;
  double evals_per_sample = 0.0;
  double seconds = 0.0;
};

struct ResultBundle {
  nlohmann::json config;
  std::string target;
  std::vector<std::optional<double>> truth;
  std::vector<std::string> qoi_names;
  std::vector<RunSummary> runs;
  std::vector<TableRow> table;
};

/// Runs every (algorithm, run) pair on a pool of `threads` workers; the
/// result does not depend on the thread count.
ResultBundle run_experiment(const ExperimentConfig& cfg, int threads = 1);

/// Aggregates run summaries into rows and fills ratios against `baseline`
/// when it is present.
std::vector<TableRow> build_table(const std::vector<RunSummary>& runs, const std::vector<std::string>& qoi_names,
                                  const std::vector<std::optional<double>>& truth, std::size_t nominal_n,
                                  const std::string& baseline = "rwm");

/// Recomputes ratios against `baseline`; throws std::invalid_argument if it is missing.
void apply_baseline(std::vector<TableRow>& rows, const std::string& baseline);

nlohmann::json bundle_to_json(const ResultBundle& b);
ResultBundle bundle_from_json(const nlohmann::json& j);

std::string runs_csv(const ResultBundle& b, bool with_timing = true);
std::string table_csv(const std::vector<TableRow>& rows);
std::string table_text(const std::vector<TableRow>& rows);

/// Writes runs.csv, table.csv, table.txt and bundle.json into `dir`.
void write_bundle(const ResultBundle& b, const std::filesystem::path& dir);

}  // namespace gpt

#endif  // GPT_EXPERIMENT_HPP
