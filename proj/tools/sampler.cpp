// sampler: run tempering experiments, generate synthetic data, run the
// finite-state oracle and merge result tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpt/experiment.hpp"
#include "gpt/targets.hpp"
#include "gpt/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerify = 2;

int cmd_run(const std::string& config_path, int threads, const std::string& out_dir,
            const std::vector<std::string>& algorithms) {
  gpt::ExperimentConfig cfg = gpt::load_config(config_path);
  if (!algorithms.empty()) {
    nlohmann::json j = gpt::config_to_json(cfg);
    j["algorithms"] = algorithms;
    cfg = gpt::parse_config(j);
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;

  std::cerr << "running " << cfg.target << ": " << cfg.algorithms.size() << " algorithm(s) x " << cfg.runs
            << " runs on " << threads << " thread(s)\n";
  const gpt::ResultBundle b = gpt::run_experiment(cfg, threads);
  gpt::write_bundle(b, cfg.output_dir);
  std::cout << gpt::table_text(b.table);
  std::cerr << "wrote " << cfg.output_dir << "/{runs.csv,table.csv,table.txt,bundle.json}\n";
  return kExitOk;
}

int cmd_gen_data(const std::string& target, std::uint64_t seed, const std::string& out, double noise) {
  gpt::DataSet d;
  if (target == "elliptic") d = gpt::gen_data_elliptic(seed, noise > 0 ? noise : gpt::kEllipticNoise);
  else if (target == "wave1d") d = gpt::gen_data_wave1d(seed, noise > 0 ? noise : gpt::kWaveNoise);
  else throw gpt::ConfigError("target: data generation is defined for elliptic and wave1d, not '" + target + "'");
  const std::string path = out.empty() ? target + "_data_" + std::to_string(seed) + ".csv" : out;
  gpt::write_dataset(d, path);
  std::cerr << "wrote " << path << " and " << gpt::sidecar_path(path).string() << "\n";
  return kExitOk;
}

int cmd_verify(std::size_t cap) {
  gpt::verify::OracleOptions opts;
  opts.cap = cap;
  const auto rows = gpt::verify::run_oracle_suite(opts);
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::printf("%-*s  %14s  %2s %10s  %s\n", static_cast<int>(width), "check", "value", "", "threshold", "result");
  bool ok = true;
  for (const auto& r : rows) {
    std::printf("%-*s  %14.6e  %2s %10.1e  %s\n", static_cast<int>(width), r.name.c_str(), r.value,
                r.upper ? "<=" : ">=", r.threshold, r.passed ? "PASS" : "FAIL");
    ok = ok && r.passed;
  }
  std::printf("%s\n", ok ? "all checks passed" : "VERIFICATION FAILED");
  return ok ? kExitOk : kExitVerify;
}

int cmd_table(const std::vector<std::string>& paths, const std::string& baseline, const std::string& out_dir) {
  gpt::ResultBundle merged;
  std::string truth_key;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw gpt::ConfigError(p + ": cannot open bundle");
    const gpt::ResultBundle b = gpt::bundle_from_json(nlohmann::json::parse(in));
    nlohmann::json truth = nlohmann::json::array();
    for (const auto& t : b.truth) truth.push_back(t ? nlohmann::json(*t) : nlohmann::json(nullptr));
    if (merged.target.empty()) {
      merged.target = b.target;
      merged.qoi_names = b.qoi_names;
      merged.truth = b.truth;
      truth_key = truth.dump();
    } else if (b.target != merged.target || b.qoi_names != merged.qoi_names || truth.dump() != truth_key) {
      throw gpt::ConfigError(p + ": bundle does not share target and truth with " + paths.front());
    }
    merged.table.insert(merged.table.end(), b.table.begin(), b.table.end());
  }
  gpt::apply_baseline(merged.table, baseline);
  std::cout << gpt::table_text(merged.table);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "table.csv") << gpt::table_csv(merged.table);
    std::ofstream(std::filesystem::path(out_dir) / "table.txt") << gpt::table_text(merged.table);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized parallel tempering samplers and benchmarks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_path, run_out;
  int threads = 1;
  std::vector<std::string> algorithms;
  run->add_option("config", config_path, "Experiment configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "Output directory (overrides output_dir)");
  run->add_option("--algorithm", algorithms, "Override the algorithm list");

  auto* gen = app.add_subcommand("gen-data", "Generate a noisy synthetic data set");
  std::string gen_target, gen_out;
  std::uint64_t gen_seed = 1;
  double noise = 0.0;
  gen->add_option("target", gen_target, "elliptic or wave1d")->required();
  gen->add_option("--seed", gen_seed, "Data seed")->required();
  gen->add_option("--out", gen_out, "Output CSV path");
  gen->add_option("--noise", noise, "Noise standard deviation (default: target's)");

  auto* ver = app.add_subcommand("verify", "Run the finite-state oracle suite");
  std::size_t cap = gpt::verify::kDefaultStateCap;
  ver->add_option("--cap", cap, "Maximum joint state count")->check(CLI::PositiveNumber);

  auto* tab = app.add_subcommand("table", "Merge result bundles into one table");
  std::vector<std::string> bundles;
  std::string baseline = "rwm", tab_out;
  tab->add_option("bundles", bundles, "bundle.json files")->required()->check(CLI::ExistingFile);
  tab->add_option("--baseline", baseline, "Baseline algorithm for error ratios");
  tab->add_option("--out", tab_out, "Directory for table.csv / table.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, threads, run_out, algorithms);
    if (*gen) return cmd_gen_data(gen_target, gen_seed, gen_out, noise);
    if (*ver) return cmd_verify(cap);
    if (*tab) return cmd_table(bundles, baseline, tab_out);
  } catch (const gpt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return kExitOk;
}
