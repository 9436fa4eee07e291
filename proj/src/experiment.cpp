#include "gpt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "gpt/swaps.hpp"
#include "gpt/targets.hpp"

namespace gpt {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Algorithm names

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::rwm: return "rwm";
    case Algorithm::pcn: return "pcn";
    case Algorithm::pt: return "pt";
    case Algorithm::rpt: return "rpt";
    case Algorithm::psdpt: return "psdpt";
    case Algorithm::ugpt: return "ugpt";
    case Algorithm::wgpt: return "wgpt";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::rwm, Algorithm::pcn, Algorithm::pt, Algorithm::rpt, Algorithm::psdpt, Algorithm::ugpt,
                 Algorithm::wgpt})
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

bool is_tempered(Algorithm a) { return a != Algorithm::rwm && a != Algorithm::pcn; }

// ---------------------------------------------------------------------------
// Configuration

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_unsigned(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto x = as_integer(v, path);
  if (x < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::uint64_t>(x);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

int as_int(const json& v, const std::string& path) {
  const auto x = as_integer(v, path);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(path, "integer out of range");
  return static_cast<int>(x);
}

const std::vector<std::string> kKnownKeys = {
    "target", "algorithm", "algorithms", "K", "temperatures", "ladder_a", "perm_scheme", "perm_window", "full_cap",
    "exclude_identity", "custom_perms", "kernel", "steps", "base_step", "N", "burn_frac", "runs", "seed", "n_s",
    "data_seed", "cost_parity", "output_dir", "truth", "grid_n", "data_file", "gaussfield"};

}  // namespace

TemperatureLadder ExperimentConfig::ladder() const {
  if (!temperatures.empty()) return TemperatureLadder::from_temperatures(temperatures);
  if (ladder_a) return build_ladder(*ladder_a, K);
  throw ConfigError("/temperatures: no temperature ladder given");
}

PermutationSet ExperimentConfig::perm_set() const {
  PermutationSet set = [&] {
    if (perm_scheme == PermScheme::custom) {
      std::vector<Permutation> perms;
      for (const auto& p : custom_perms) perms.push_back(Permutation::from_one_based(p));
      return PermutationSet::custom(std::move(perms));
    }
    return enumerate_permutations(K, perm_scheme, perm_window, full_cap);
  }();
  return exclude_identity ? set.without_identity() : set;
}

std::size_t ExperimentConfig::iterations(Algorithm a) const {
  return (!is_tempered(a) && cost_parity) ? N * static_cast<std::size_t>(K) : N;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("", "configuration must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), it.key()) == kKnownKeys.end()) fail("/" + it.key(), "unknown field");

  ExperimentConfig c;
  if (auto v = find(j, "target")) c.target = as_string(*v, "/target");
  if (c.target != "circle" && c.target != "elliptic" && c.target != "wave1d" && c.target != "gaussfield")
    fail("/target", "unknown target '" + c.target + "'");

  const json* algs = find(j, "algorithms");
  const json* alg = find(j, "algorithm");
  if (algs && alg) fail("/algorithm", "give either algorithm or algorithms, not both");
  if (alg) {
    try {
      c.algorithms.push_back(parse_algorithm(as_string(*alg, "/algorithm")));
    } catch (const std::invalid_argument& e) {
      fail("/algorithm", e.what());
    }
  } else if (algs) {
    if (!algs->is_array() || algs->empty()) fail("/algorithms", "expected a non-empty array of names");
    for (std::size_t i = 0; i < algs->size(); ++i) {
      const std::string path = "/algorithms/" + std::to_string(i);
      try {
        c.algorithms.push_back(parse_algorithm(as_string((*algs)[i], path)));
      } catch (const std::invalid_argument& e) {
        fail(path, e.what());
      }
    }
  } else {
    fail("/algorithms", "missing");
  }

  const bool any_tempered = std::any_of(c.algorithms.begin(), c.algorithms.end(), is_tempered);
  const bool any_single = !std::all_of(c.algorithms.begin(), c.algorithms.end(), is_tempered);

  if (auto v = find(j, "K")) c.K = as_int(*v, "/K");
  if (auto v = find(j, "temperatures")) c.temperatures = as_numbers(*v, "/temperatures");
  if (auto v = find(j, "ladder_a")) c.ladder_a = as_number(*v, "/ladder_a");
  if (auto v = find(j, "perm_scheme")) {
    try {
      c.perm_scheme = parse_perm_scheme(as_string(*v, "/perm_scheme"));
    } catch (const std::invalid_argument& e) {
      fail("/perm_scheme", e.what());
    }
  }
  if (auto v = find(j, "perm_window")) c.perm_window = as_int(*v, "/perm_window");
  if (auto v = find(j, "full_cap")) c.full_cap = as_int(*v, "/full_cap");
  if (auto v = find(j, "exclude_identity")) c.exclude_identity = as_bool(*v, "/exclude_identity");
  if (auto v = find(j, "custom_perms")) {
    if (!v->is_array()) fail("/custom_perms", "expected an array of permutations");
    for (std::size_t i = 0; i < v->size(); ++i) {
      std::vector<int> p;
      for (double x : as_numbers((*v)[i], "/custom_perms/" + std::to_string(i))) p.push_back(static_cast<int>(x));
      c.custom_perms.push_back(std::move(p));
    }
  }
  if (auto v = find(j, "kernel")) {
    try {
      c.kernel = parse_kernel_kind(as_string(*v, "/kernel"));
    } catch (const std::invalid_argument& e) {
      fail("/kernel", e.what());
    }
  }
  if (auto v = find(j, "steps")) c.steps = as_numbers(*v, "/steps");
  if (auto v = find(j, "base_step")) c.base_step = as_number(*v, "/base_step");
  if (auto v = find(j, "N")) {
    const auto n = as_integer(*v, "/N");
    if (n < 1) fail("/N", "must be >= 1");
    c.N = static_cast<std::size_t>(n);
  }
  if (auto v = find(j, "burn_frac")) c.burn_frac = as_number(*v, "/burn_frac");
  if (!(c.burn_frac >= 0.0 && c.burn_frac < 1.0)) fail("/burn_frac", "must lie in [0,1)");
  if (auto v = find(j, "runs")) c.runs = as_int(*v, "/runs");
  if (c.runs < 2) fail("/runs", "at least 2 runs are needed for MSE/variance tables");
  if (auto v = find(j, "seed")) c.seed = as_unsigned(*v, "/seed");
  if (auto v = find(j, "n_s")) c.n_s = as_int(*v, "/n_s");
  if (c.n_s < 1) fail("/n_s", "must be >= 1");
  if (auto v = find(j, "data_seed")) c.data_seed = as_unsigned(*v, "/data_seed");
  if (auto v = find(j, "cost_parity")) c.cost_parity = as_bool(*v, "/cost_parity");
  if (auto v = find(j, "output_dir")) c.output_dir = as_string(*v, "/output_dir");
  if (auto v = find(j, "truth")) c.truth = as_numbers(*v, "/truth");
  if (auto v = find(j, "grid_n")) c.grid_n = as_int(*v, "/grid_n");
  if (c.grid_n < 8) fail("/grid_n", "must be >= 8");
  if (auto v = find(j, "data_file")) c.data_file = as_string(*v, "/data_file");
  if (auto v = find(j, "gaussfield")) {
    if (!v->is_object()) fail("/gaussfield", "expected an object");
    if (auto d = find(*v, "dim")) c.gaussfield.dim = as_int(*d, "/gaussfield/dim");
    if (auto s = find(*v, "mode_sd")) c.gaussfield.mode_sd = as_number(*s, "/gaussfield/mode_sd");
    if (auto m = find(*v, "modes")) {
      if (!m->is_array()) fail("/gaussfield/modes", "expected an array of vectors");
      for (std::size_t i = 0; i < m->size(); ++i)
        c.gaussfield.modes.push_back(as_numbers((*m)[i], "/gaussfield/modes/" + std::to_string(i)));
    }
  }

  if (any_tempered) {
    if (c.temperatures.empty() && !c.ladder_a) fail("/temperatures", "tempered algorithms need temperatures or ladder_a");
    if (!c.temperatures.empty() && c.ladder_a) fail("/ladder_a", "give either temperatures or ladder_a, not both");
    if (!c.temperatures.empty()) c.K = static_cast<int>(c.temperatures.size());
    if (c.K < 2) fail("/K", "tempered algorithms need K >= 2");
    try {
      (void)c.ladder();
    } catch (const std::invalid_argument& e) {
      fail(c.temperatures.empty() ? "/ladder_a" : "/temperatures", e.what());
    }
    if (static_cast<int>(c.steps.size()) != c.K)
      fail("/steps", "expected " + std::to_string(c.K) + " step sizes, got " + std::to_string(c.steps.size()));
    for (std::size_t k = 0; k < c.steps.size(); ++k) {
      try {
        KernelSpec{c.kernel, c.steps[k], {}}.validate(1);
      } catch (const std::invalid_argument& e) {
        fail("/steps/" + std::to_string(k), e.what());
      }
    }
    const bool needs_perms = std::any_of(c.algorithms.begin(), c.algorithms.end(),
                                         [](Algorithm a) { return a == Algorithm::ugpt || a == Algorithm::wgpt; });
    if (needs_perms) {
      try {
        const auto set = c.perm_set();
        if (set.K() != c.K) fail("/custom_perms", "permutation length differs from K");
      } catch (const std::invalid_argument& e) {
        fail(c.perm_scheme == PermScheme::custom ? "/custom_perms" : "/perm_scheme", e.what());
      }
    }
  } else if (c.K < 1) {
    fail("/K", "must be >= 1");
  }
  if (any_single) {
    const bool pcn = std::find(c.algorithms.begin(), c.algorithms.end(), Algorithm::pcn) != c.algorithms.end();
    try {
      KernelSpec{pcn ? KernelKind::pcn : KernelKind::rwm, c.base_step, {}}.validate(1);
    } catch (const std::invalid_argument& e) {
      fail("/base_step", e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["target"] = c.target;
  j["algorithms"] = json::array();
  for (auto a : c.algorithms) j["algorithms"].push_back(to_string(a));
  j["K"] = c.K;
  if (!c.temperatures.empty()) j["temperatures"] = c.temperatures;
  if (c.ladder_a) j["ladder_a"] = *c.ladder_a;
  j["perm_scheme"] = to_string(c.perm_scheme);
  j["perm_window"] = c.perm_window;
  j["full_cap"] = c.full_cap;
  j["exclude_identity"] = c.exclude_identity;
  if (!c.custom_perms.empty()) j["custom_perms"] = c.custom_perms;
  j["kernel"] = to_string(c.kernel);
  j["steps"] = c.steps;
  j["base_step"] = c.base_step;
  j["N"] = c.N;
  j["burn_frac"] = c.burn_frac;
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  j["n_s"] = c.n_s;
  j["data_seed"] = c.data_seed;
  j["cost_parity"] = c.cost_parity;
  j["output_dir"] = c.output_dir;
  if (!c.truth.empty()) j["truth"] = c.truth;
  j["grid_n"] = c.grid_n;
  if (!c.data_file.empty()) j["data_file"] = c.data_file;
  if (c.target == "gaussfield")
    j["gaussfield"] = {{"dim", c.gaussfield.dim}, {"modes", c.gaussfield.modes}, {"mode_sd", c.gaussfield.mode_sd}};
  return j;
}

// ---------------------------------------------------------------------------
// Problems

namespace {

constexpr int kWaveQuadraturePoints = 200001;

DataSet load_or_generate(const ExperimentConfig& cfg) {
  if (!cfg.data_file.empty()) {
    DataSet d = read_dataset(cfg.data_file);
    if (d.target_name != cfg.target)
      throw ConfigError("/data_file: data set is for target '" + d.target_name + "'");
    return d;
  }
  return cfg.target == "wave1d" ? gen_data_wave1d(cfg.data_seed) : gen_data_elliptic(cfg.data_seed);
}

}  // namespace

Problem make_problem(const ExperimentConfig& cfg) {
  Problem p;
  if (cfg.target == "circle") {
    p.target = circle_target();
    const double m = circle_posterior_mean();
    p.truth = {m, m};
    p.truth_source = "quadrature";
  } else if (cfg.target == "wave1d") {
    p.target = wave1d_target(load_or_generate(cfg));
    p.truth = {wave1d_posterior_mean(*p.target, kWaveQuadraturePoints)};
    p.truth_source = "quadrature";
  } else if (cfg.target == "elliptic") {
    const DataSet d = load_or_generate(cfg);
    try {
      p.target = elliptic_target(d, cfg.grid_n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("/data_file: ") + e.what());
    }
    p.truth_source = "none";
  } else {
    std::vector<ParamVector> modes;
    for (const auto& m : cfg.gaussfield.modes) modes.push_back(Eigen::Map<const ParamVector>(m.data(), static_cast<Eigen::Index>(m.size())));
    if (modes.empty()) {
      ParamVector m = ParamVector::Zero(cfg.gaussfield.dim);
      m[0] = 2.0;
      modes = {m, -m};
    }
    try {
      p.target = gaussfield_target(cfg.gaussfield.dim, std::move(modes), cfg.gaussfield.mode_sd);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("/gaussfield: ") + e.what());
    }
    p.truth_source = "none";
  }
  p.qois = p.target->qois();
  p.truth.resize(p.qois.size());
  if (!cfg.truth.empty()) {
    if (cfg.truth.size() != p.qois.size())
      throw ConfigError("/truth: expected " + std::to_string(p.qois.size()) + " values");
    for (std::size_t i = 0; i < cfg.truth.size(); ++i) p.truth[i] = cfg.truth[i];
    p.truth_source = "config";
  }
  const bool pcn = cfg.kernel == KernelKind::pcn ||
                   std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::pcn) != cfg.algorithms.end();
  if (pcn && !p.target->normal_prior_scale())
    throw ConfigError("/target: pCN needs a target with a normal prior (gaussfield)");
  return p;
}

// ---------------------------------------------------------------------------
// Runs

RunOutput run_single(const ExperimentConfig& cfg, const Problem& problem, Algorithm algorithm, int run,
                     bool keep_trace) {
  const auto t0 = std::chrono::steady_clock::now();
  const TargetModel& target = *problem.target;
  const bool tempered = is_tempered(algorithm);
  const TemperatureLadder ladder = tempered ? cfg.ladder() : TemperatureLadder({1.0});
  const int K = ladder.size();

  std::vector<KernelSpec> specs;
  if (tempered) {
    for (double s : cfg.steps) specs.push_back(KernelSpec{cfg.kernel, s, {}});
  } else {
    specs.push_back(algorithm == Algorithm::rwm ? KernelSpec::rwm(cfg.base_step) : KernelSpec::pcn(cfg.base_step));
  }
  for (const auto& s : specs) s.validate(target.dim());

  const auto r = static_cast<std::uint64_t>(run);
  std::vector<RandomStream> rngs;
  for (int k = 0; k < K; ++k) rngs.push_back(RandomStream::derive(cfg.seed, r, static_cast<std::uint64_t>(k)));
  auto swap_rng = RandomStream::derive(cfg.seed, r, StreamTag::swap);
  auto init_rng = RandomStream::derive(cfg.seed, r, StreamTag::init);

  StepStats stats(K);
  std::vector<ChainState> init;
  for (int k = 0; k < K; ++k) init.push_back(evaluate_state(target.sample_prior(init_rng), target, &stats));
  Ensemble e(std::move(init));

  ChainTrace trace;
  trace.algorithm = to_string(algorithm);
  if (algorithm == Algorithm::ugpt || algorithm == Algorithm::wgpt)
    trace.perms = std::make_shared<const PermutationSet>(cfg.perm_set());

  const std::size_t iters = cfg.iterations(algorithm);
  if (algorithm == Algorithm::wgpt) trace.weighted.reserve(iters);
  else trace.samples.reserve(iters);

  for (std::size_t n = 0; n < iters; ++n) {
    switch (algorithm) {
      case Algorithm::rwm:
      case Algorithm::pcn: e = product_step(e, ladder, specs, target, rngs, &stats); break;
      case Algorithm::pt: e = pt_step(e, ladder, specs, target, cfg.n_s, rngs, swap_rng, &stats); break;
      case Algorithm::rpt: e = rpt_step(e, ladder, specs, target, cfg.n_s, rngs, swap_rng, &stats); break;
      case Algorithm::psdpt: e = psdpt_step(e, ladder, specs, target, rngs, swap_rng, &stats); break;
      case Algorithm::ugpt: e = ugpt_step(e, ladder, specs, target, *trace.perms, rngs, swap_rng, &stats); break;
      case Algorithm::wgpt: {
        WeightedSample ws = wgpt_step(e, ladder, specs, target, *trace.perms, rngs, swap_rng, &stats);
        e = ws.ensemble;
        trace.weighted.push_back(std::move(ws));
        break;
      }
    }
    if (algorithm != Algorithm::wgpt) trace.samples.push_back(e.state(0));
  }
  trace.stats = stats;

  RunOutput out;
  RunSummary& s = out.summary;
  s.run = run;
  s.algorithm = trace.algorithm;
  s.n = iters;
  s.burn = burn_in_count(iters, cfg.burn_frac);
  s.seed = cfg.seed;
  s.evaluations = stats.evaluations;
  for (int k = 0; k < K; ++k) {
    s.proposals += stats.proposed[static_cast<std::size_t>(k)];
    s.acceptance.push_back(stats.acceptance_rate(k));
  }
  for (const auto& q : problem.qois) {
    s.qoi_names.push_back(q.name);
    s.estimates.push_back(estimate(trace, q.eval, cfg.burn_frac));
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (keep_trace) out.trace = std::move(trace);
  return out;
}

ResultBundle run_experiment(const ExperimentConfig& cfg, int threads) {
  const Problem problem = make_problem(cfg);

  struct Task {
    Algorithm algorithm;
    int run;
  };
  std::vector<Task> tasks;
  for (auto a : cfg.algorithms)
    for (int r = 1; r <= cfg.runs; ++r) tasks.push_back({a, r});

  std::vector<RunSummary> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = run_single(cfg, problem, tasks[i].algorithm, tasks[i].run).summary;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_workers = std::clamp(threads, 1, static_cast<int>(tasks.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  ResultBundle b;
  b.config = config_to_json(cfg);
  b.target = cfg.target;
  b.truth = problem.truth;
  for (const auto& q : problem.qois) b.qoi_names.push_back(q.name);
  b.runs = std::move(results);
  b.table = build_table(b.runs, b.qoi_names, b.truth, cfg.N);
  return b;
}

// ---------------------------------------------------------------------------
// Tables

std::vector<TableRow> build_table(const std::vector<RunSummary>& runs, const std::vector<std::string>& qoi_names,
                                  const std::vector<std::optional<double>>& truth, std::size_t nominal_n,
                                  const std::string& baseline) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunSummary*>> by_alg;
  for (const auto& r : runs) {
    if (!by_alg.count(r.algorithm)) order.push_back(r.algorithm);
    by_alg[r.algorithm].push_back(&r);
  }

  std::vector<TableRow> rows;
  for (const auto& alg : order) {
    const auto& rs = by_alg[alg];
    double proposals = 0.0, seconds = 0.0;
    for (const auto* r : rs) {
      proposals += static_cast<double>(r->proposals);
      seconds += r->seconds;
    }
    for (std::size_t q = 0; q < qoi_names.size(); ++q) {
      std::vector<double> est;
      for (const auto* r : rs) est.push_back(r->estimates.at(q));
      const Aggregate a = aggregate_runs(est, truth.at(q));
      TableRow row;
      row.algorithm = alg;
      row.qoi = qoi_names[q];
      row.runs = rs.size();
      row.mean = a.mean;
      row.error = a.error();
      row.error_kind = a.truth ? "MSE" : "Var";
      row.evals_per_sample = proposals / static_cast<double>(rs.size()) / static_cast<double>(nominal_n);
      row.seconds = seconds / static_cast<double>(rs.size());
      rows.push_back(row);
    }
  }
  if (by_alg.count(baseline)) apply_baseline(rows, baseline);
  return rows;
}

void apply_baseline(std::vector<TableRow>& rows, const std::string& baseline) {
  std::map<std::string, double> base;
  for (const auto& r : rows)
    if (r.algorithm == baseline) base[r.qoi] = r.error;
  if (base.empty()) throw std::invalid_argument("baseline '" + baseline + "' not present in the results");
  for (auto& r : rows) {
    auto it = base.find(r.qoi);
    if (it == base.end()) throw std::invalid_argument("baseline '" + baseline + "' has no row for " + r.qoi);
    r.ratio = error_ratio(it->second, r.error);
  }
}

json bundle_to_json(const ResultBundle& b) {
  json j;
  j["config"] = b.config;
  j["target"] = b.target;
  j["qois"] = b.qoi_names;
  j["truth"] = json::array();
  for (const auto& t : b.truth) j["truth"].push_back(t ? json(*t) : json(nullptr));
  j["runs"] = json::array();
  for (const auto& r : b.runs) {
    json jr{{"run", r.run},           {"algorithm", r.algorithm}, {"seed", r.seed},
            {"n", r.n},               {"burn", r.burn},           {"evaluations", r.evaluations},
            {"proposals", r.proposals}, {"acceptance", r.acceptance}, {"seconds", r.seconds}};
    jr["estimates"] = json::object();
    for (std::size_t q = 0; q < r.qoi_names.size(); ++q) jr["estimates"][r.qoi_names[q]] = r.estimates[q];
    j["runs"].push_back(jr);
  }
  j["table"] = json::array();
  for (const auto& t : b.table) {
    json jt{{"algorithm", t.algorithm}, {"qoi", t.qoi},           {"runs", t.runs},
            {"mean", t.mean},           {"error", t.error},       {"error_kind", t.error_kind},
            {"evals_per_sample", t.evals_per_sample},             {"seconds", t.seconds}};
    jt["ratio"] = t.ratio && std::isfinite(*t.ratio) ? json(*t.ratio) : json(nullptr);
    j["table"].push_back(jt);
  }
  j["metadata"] = {{"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long>(__cplusplus)},
#ifdef NDEBUG
                   {"assertions", false}
#else
                   {"assertions", true}
#endif
  };
  return j;
}

ResultBundle bundle_from_json(const json& j) {
  ResultBundle b;
  b.config = j.at("config");
  b.target = j.at("target").get<std::string>();
  b.qoi_names = j.at("qois").get<std::vector<std::string>>();
  for (const auto& t : j.at("truth")) b.truth.push_back(t.is_null() ? std::nullopt : std::optional<double>(t.get<double>()));
  for (const auto& jr : j.at("runs")) {
    RunSummary r;
    r.run = jr.at("run").get<int>();
    r.algorithm = jr.at("algorithm").get<std::string>();
    r.seed = jr.at("seed").get<std::uint64_t>();
    r.n = jr.at("n").get<std::size_t>();
    r.burn = jr.at("burn").get<std::size_t>();
    r.evaluations = jr.at("evaluations").get<std::uint64_t>();
    r.proposals = jr.at("proposals").get<std::uint64_t>();
    r.acceptance = jr.at("acceptance").get<std::vector<double>>();
    r.seconds = jr.at("seconds").get<double>();
    for (const auto& name : b.qoi_names) {
      r.qoi_names.push_back(name);
      r.estimates.push_back(jr.at("estimates").at(name).get<double>());
    }
    b.runs.push_back(std::move(r));
  }
  for (const auto& jt : j.at("table")) {
    TableRow t;
    t.algorithm = jt.at("algorithm").get<std::string>();
    t.qoi = jt.at("qoi").get<std::string>();
    t.runs = jt.at("runs").get<std::size_t>();
    t.mean = jt.at("mean").get<double>();
    t.error = jt.at("error").get<double>();
    t.error_kind = jt.at("error_kind").get<std::string>();
    if (!jt.at("ratio").is_null()) t.ratio = jt.at("ratio").get<double>();
    t.evals_per_sample = jt.at("evals_per_sample").get<double>();
    t.seconds = jt.at("seconds").get<double>();
    b.table.push_back(std::move(t));
  }
  return b;
}

namespace {

std::string num(double x, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

}  // namespace

std::string runs_csv(const ResultBundle& b, bool with_timing) {
  std::ostringstream os;
  os << "run_id,algorithm,qoi,estimate,n_evals" << (with_timing ? ",seconds" : "") << '\n';
  for (const auto& r : b.runs)
    for (std::size_t q = 0; q < r.qoi_names.size(); ++q) {
      os << r.run << ',' << r.algorithm << ',' << r.qoi_names[q] << ',' << num(r.estimates[q], "%.17g") << ','
         << r.evaluations;
      if (with_timing) os << ',' << num(r.seconds, "%.4f");
      os << '\n';
    }
  return os.str();
}

std::string table_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "algorithm,qoi,runs,mean,error_kind,error,ratio,evals_per_sample,seconds\n";
  for (const auto& r : rows)
    os << r.algorithm << ',' << r.qoi << ',' << r.runs << ',' << num(r.mean) << ',' << r.error_kind << ','
       << num(r.error) << ',' << (r.ratio ? num(*r.ratio) : std::string()) << ',' << num(r.evals_per_sample) << ','
       << num(r.seconds, "%.4f") << '\n';
  return os.str();
}

std::string table_text(const std::vector<TableRow>& rows) {
  std::vector<std::vector<std::string>> cells{
      {"Algorithm", "QoI", "Mean", "MSE/Var", "Ratio", "Evals/sample", "Seconds"}};
  for (const auto& r : rows)
    cells.push_back({r.algorithm, r.qoi, num(r.mean, "%.5f"), num(r.error, "%.4e") + " (" + r.error_kind + ")",
                     r.ratio ? num(*r.ratio, "%.3g") : "-", num(r.evals_per_sample, "%.3f"),
                     num(r.seconds, "%.2f")});
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      const auto& s = cells[i][c];
      if (c < 2) os << s << std::string(width[c] - s.size(), ' ');
      else os << std::string(width[c] - s.size(), ' ') << s;
      os << (c + 1 < cells[i].size() ? "  " : "\n");
    }
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      os << std::string(total - 2, '-') << '\n';
    }
  }
  return os.str();
}

void write_bundle(const ResultBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("runs.csv", runs_csv(b));
  write("table.csv", table_csv(b.table));
  write("table.txt", table_text(b.table));
  write("bundle.json", bundle_to_json(b).dump(2) + "\n");
}

}  // namespace gpt
