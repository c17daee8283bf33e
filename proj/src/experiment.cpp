#include "benignlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "benignlab/csv.hpp"
#include "benignlab/rng.hpp"

namespace benignlab {

MissingArtifacts::MissingArtifacts(std::vector<std::string> files)
    : std::runtime_error([&files] {
        std::string msg = "missing artifacts:";
        for (const auto& f : files) msg += " " + f;
        return msg;
      }()),
      files_(std::move(files)) {}

ExperimentConfig::ExperimentConfig() {
  data.d = 100;
  data.n = 20;
  data.mu_norm = 5.0;
  data.sigma_p = 1.0;
  data.p = 0.1;
  train.m = 10;
  train.eta = 0.1;
  train.sigma_0 = 0.01;
  train.max_iters = 100;
  train.epsilon = 1e-6;
  train.record_every = 1;
}

// ---------------------------------------------------------------------------
// Settings

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError(key, "expected a real number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    if (v.empty() || v[0] == '-' || v[0] == '+') throw std::invalid_argument(v);
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used, 10);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError(key, "expected a non-negative integer, got '" + v + "'");
  }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(parse_u64(key, v));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(parse(key, item));
  if (out.empty()) throw UsageError(key, "list must be nonempty");
  return out;
}

struct Setting {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_real(v[k]);
  return s;
}

#define REAL_SETTING(name, field) \
  Setting{name, [](ExperimentConfig& c, const std::string& v) { c.field = parse_real(name, v); }, \
          [](const ExperimentConfig& c) { return format_real(c.field); }}
#define SIZE_SETTING(name, field) \
  Setting{name, [](ExperimentConfig& c, const std::string& v) { c.field = parse_size(name, v); }, \
          [](const ExperimentConfig& c) { return std::to_string(c.field); }}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      SIZE_SETTING("d", data.d),
      SIZE_SETTING("n", data.n),
      REAL_SETTING("mu", data.mu_norm),
      REAL_SETTING("sigma_p", data.sigma_p),
      REAL_SETTING("p", data.p),
      SIZE_SETTING("m", train.m),
      REAL_SETTING("eta", train.eta),
      SIZE_SETTING("iters", train.max_iters),
      REAL_SETTING("epsilon", train.epsilon),
      REAL_SETTING("sigma0", train.sigma_0),
      SIZE_SETTING("record_every", train.record_every),
      SIZE_SETTING("test_count", test_count),
      Setting{"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); },
              [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      Setting{"out", [](ExperimentConfig& c, const std::string& v) { c.out = v; },
              [](const ExperimentConfig& c) { return c.out.string(); }},
      SIZE_SETTING("workers", workers),
      Setting{"d_values",
              [](ExperimentConfig& c, const std::string& v) {
                c.d_values = parse_list<std::size_t>("d_values", v, parse_size);
              },
              [](const ExperimentConfig& c) { return join_sizes(c.d_values); }},
      Setting{"mu_values",
              [](ExperimentConfig& c, const std::string& v) {
                c.mu_values = parse_list<double>("mu_values", v, parse_real);
              },
              [](const ExperimentConfig& c) { return join_reals(c.mu_values); }},
      SIZE_SETTING("replications", replications),
      REAL_SETTING("cutoff", cutoff),
      REAL_SETTING("band_factor", monitor.band_factor),
      REAL_SETTING("warmup_loss", monitor.warmup_loss),
      REAL_SETTING("kappa", monitor.kappa),
      REAL_SETTING("c4", monitor.c4),
      REAL_SETTING("spread_bound", monitor.figure_spread),
      REAL_SETTING("monotone_tol", monitor.monotone_tol),
      REAL_SETTING("delta", delta),
  };
  return table;
}

#undef REAL_SETTING
#undef SIZE_SETTING

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : settings()) k.push_back(s.key);
    return k;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& s : settings()) {
    if (s.key == key) {
      s.set(cfg, trim(value));
      return;
    }
  }
  throw UsageError(key, "unknown configuration key");
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config", path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  for (const auto& [k, v] : read_config_file(path)) apply_setting(cfg, k, v);
}

void validate(const ExperimentConfig& cfg) {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const InvalidConfig& e) {
      const std::string msg = e.what();
      const auto colon = msg.find(':');
      throw UsageError(msg.substr(0, colon), colon == std::string::npos ? msg : trim(msg.substr(colon + 1)));
    }
  };
  wrap([&] { cfg.data.validate(); });
  wrap([&] { cfg.train.validate(); });
  if (cfg.test_count < 1) throw UsageError("test_count", "must be >= 1");
  if (cfg.workers < 1) throw UsageError("workers", "must be >= 1");
  if (cfg.replications < 1) throw UsageError("replications", "must be >= 1");
  if (!(cfg.cutoff > 0.0 && cfg.cutoff < 1.0)) throw UsageError("cutoff", "must lie in (0, 1)");
  if (cfg.d_values.empty()) throw UsageError("d_values", "must be nonempty");
  if (cfg.mu_values.empty()) throw UsageError("mu_values", "must be nonempty");
  for (auto d : cfg.d_values) {
    if (d < 1) throw UsageError("d_values", "entries must be >= 1");
  }
  for (auto mu : cfg.mu_values) {
    if (!(mu >= 0.0)) throw UsageError("mu_values", "entries must be >= 0");
  }
  if (!(cfg.monitor.band_factor >= 1.0)) throw UsageError("band_factor", "must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw UsageError("delta", "must lie in (0, 1)");
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& s : settings()) out += s.key + "=" + s.get(cfg) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Seeds

RunSeeds run_seeds(std::uint64_t seed) {
  return {derive_seed(seed, {1}), derive_seed(seed, {2}), derive_seed(seed, {3})};
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t d, double mu, std::size_t rep) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(d), double_bits(mu), static_cast<std::uint64_t>(rep)});
}

// ---------------------------------------------------------------------------
// Single run

RunOutcome run_experiment(const ExperimentConfig& cfg_in, bool track) {
  validate(cfg_in);
  RunOutcome out;
  out.config = cfg_in;
  ExperimentConfig& cfg = out.config;
  const RunSeeds seeds = run_seeds(cfg.seed);
  cfg.data.seed = seeds.data;
  cfg.train.init_seed = seeds.init;

  out.mu = make_signal(cfg.data.d, cfg.data.mu_norm);
  out.data = generate_dataset(cfg.data, out.mu);
  const Weights w0 = init_weights(cfg.train.m, cfg.data.d, cfg.train.sigma_0, seeds.init);
  const Dataset test_points = sample_test_points(cfg.data, cfg.test_count, seeds.test);

  TrainHooks hooks;
  std::optional<CoefficientTracker> tracker;
  std::optional<ActivationRecorder> recorder;
  if (track) {
    tracker.emplace(out.data, out.mu, cfg.train.eta, true);
    recorder.emplace(out.data);
    hooks.observers = {&*tracker, &*recorder};
    hooks.test_error = [&test_points, &cfg](const Weights& w) {
      return estimate_error(w, test_points, cfg.data.p).estimate;
    };
  }

  out.run = train(out.data, w0, cfg.data, cfg.train, hooks);
  out.evaluation = estimate_error(out.run.final_weights, test_points, cfg.data.p);
  out.phase_quantity = cfg.data.mu_norm > 0.0
                           ? phase_quantity(static_cast<double>(cfg.data.n), cfg.data.mu_norm, cfg.data.sigma_p,
                                            static_cast<double>(cfg.data.d))
                           : 0.0;
  out.condition = condition_report(cfg.data, cfg.train, cfg.train.max_iters, cfg.delta);

  if (track) {
    out.coefficients = tracker->history();
    out.dual_track = tracker->dual_track();
    out.basis_condition = tracker->basis().condition();
    out.activations = recorder->history();
    RunHistories h;
    h.iterations = out.run.iterations;
    h.coefficients = *out.coefficients;
    h.activations = *out.activations;
    h.labels = out.activations->labels;
    out.invariants = run_theory_checks(h, cfg.data, cfg.monitor);
    out.invariants.append(check_dual_track(out.dual_track, out.basis_condition));
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

// coeffs.csv carries per-filter aggregates of rho.csv; a mismatch means one
// of the two files was edited.
CheckResult summary_consistency(const CsvTable& coeffs, const CoefficientHistory& h) {
  CheckResult res;
  res.name = "summary_consistency";
  res.bound = 1e-12;
  std::map<std::size_t, std::size_t> index;
  for (std::size_t k = 0; k < h.t.size(); ++k) index[h.t[k]] = k;
  for (std::size_t row = 0; row < coeffs.rows.size(); ++row) {
    const auto t = static_cast<std::size_t>(coeffs.integer(row, "t"));
    const int j = static_cast<int>(coeffs.integer(row, "j"));
    const auto r = static_cast<std::size_t>(coeffs.integer(row, "r"));
    const auto it = index.find(t);
    if (it == index.end()) continue;
    for (const auto& s : coefficient_summaries(h.snapshots[it->second])) {
      if (s.j != j || s.r != r) continue;
      const std::pair<const char*, double> cols[] = {
          {"sum_zeta", s.sum_zeta}, {"max_zeta", s.max_zeta}, {"min_omega", s.min_omega}};
      for (const auto& [name, expect] : cols) {
        const double got = coeffs.real(row, name);
        const double err = std::abs(got - expect) / std::max(1.0, std::abs(expect));
        if (err > res.observed) {
          res.observed = err;
          res.witness = Witness{t, {{"j", j}, {"r", static_cast<long long>(r)}}, got};
          res.note = std::string("coeffs.csv ") + name + " disagrees with rho.csv";
        }
      }
    }
  }
  if (res.observed > res.bound) {
    res.status = CheckStatus::Fail;
  } else {
    res.note.clear();
    res.witness.reset();
  }
  return res;
}

}  // namespace

void write_run_artifacts(const RunOutcome& o, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.txt", render_config(o.config));
  write_dataset_csv(dir / "dataset.csv", o.data);
  write_run_csv(dir / "run.csv", o.run);
  write_margins_csv(dir / "margins.csv", o.run);
  write_weights_csv(dir / "weights.csv", o.run.final_weights);
  write_weights_csv(dir / "weights_init.csv", o.run.initial_weights);

  CsvTable ev;
  ev.header = {"count", "error", "std_err", "clean_error", "bayes_gap", "phase_quantity"};
  ev.rows.push_back({std::to_string(o.evaluation.count), format_real(o.evaluation.estimate),
                     format_real(o.evaluation.std_err), format_real(o.evaluation.clean_error),
                     format_real(o.evaluation.bayes_gap), format_real(o.phase_quantity)});
  write_csv(dir / "evaluation.csv", ev);
  write_text(dir / "condition.json", o.condition.to_json());

  if (o.coefficients) {
    write_coeffs_csv(dir / "coeffs.csv", *o.coefficients);
    write_rho_csv(dir / "rho.csv", *o.coefficients);
    write_gamma_steps_csv(dir / "gamma_steps.csv", *o.coefficients);
  }
  if (o.activations) write_activations_csv(dir / "activations.csv", *o.activations);
  write_text(dir / "invariants.json", o.invariants.to_json());
}

const std::vector<std::string>& check_artifacts() {
  static const std::vector<std::string> files = {"config.txt", "dataset.csv",     "run.csv",
                                                 "margins.csv", "coeffs.csv",     "rho.csv",
                                                 "gamma_steps.csv", "activations.csv"};
  return files;
}

InvariantReport check_run_directory(const std::filesystem::path& dir) {
  std::vector<std::string> missing;
  for (const auto& f : check_artifacts()) {
    if (!std::filesystem::is_regular_file(dir / f)) missing.push_back(f);
  }
  if (!missing.empty()) throw MissingArtifacts(std::move(missing));

  ExperimentConfig cfg;
  apply_config_file(cfg, dir / "config.txt");
  const Dataset data = read_dataset_csv(dir / "dataset.csv");
  RunHistories h;
  for (const auto& pt : data) h.labels.push_back(pt.y);
  h.iterations = read_iteration_records(dir / "run.csv", dir / "margins.csv");
  h.coefficients = read_coefficient_history(dir / "coeffs.csv", dir / "rho.csv", dir / "gamma_steps.csv");
  h.activations = read_activations_csv(dir / "activations.csv", h.labels);
  InvariantReport report = run_theory_checks(h, cfg.data, cfg.monitor);
  report.checks.push_back(summary_consistency(read_csv(dir / "coeffs.csv"), h.coefficients));
  return report;
}

// ---------------------------------------------------------------------------
// Sweep

bool SweepResult::any_failed() const {
  return std::any_of(replicates.begin(), replicates.end(), [](const SweepReplicate& r) { return r.failed; });
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  SweepResult result;
  for (std::size_t d : cfg.d_values) {
    for (double mu : cfg.mu_values) {
      for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
        result.replicates.push_back({d, mu, rep, cell_seed(cfg.seed, d, mu, rep), false, "", 0.0, 0.0});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < result.replicates.size(); k = next++) {
      SweepReplicate& r = result.replicates[k];
      ExperimentConfig c = cfg;
      c.data.d = r.d;
      c.data.mu_norm = r.mu;
      c.seed = r.seed;
      try {
        const RunOutcome o = run_experiment(c, false);
        r.final_loss = o.run.iterations.back().loss;
        r.test_error = o.evaluation.estimate;
      } catch (const DivergenceError& e) {
        r.failed = true;
        r.failure = e.what();
      }
    }
  };
  const std::size_t nthreads = std::min(cfg.workers, result.replicates.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t base = 0; base < result.replicates.size(); base += cfg.replications) {
    SweepCell cell;
    cell.d = result.replicates[base].d;
    cell.mu = result.replicates[base].mu;
    std::vector<double> errs;
    double loss_sum = 0.0;
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      const SweepReplicate& r = result.replicates[base + rep];
      if (r.failed) {
        ++cell.failed;
        continue;
      }
      errs.push_back(r.test_error);
      loss_sum += r.final_loss;
    }
    if (errs.empty()) {
      cell.mean_error = cell.std_error = cell.mean_final_loss = NAN;
    } else {
      double sum = 0.0;
      for (double e : errs) sum += e;
      cell.mean_error = sum / static_cast<double>(errs.size());
      double ss = 0.0;
      for (double e : errs) ss += (e - cell.mean_error) * (e - cell.mean_error);
      cell.std_error = errs.size() > 1 ? std::sqrt(ss / static_cast<double>(errs.size() - 1)) : 0.0;
      cell.mean_final_loss = loss_sum / static_cast<double>(errs.size());
    }
    cell.phase_quantity =
        cell.mu > 0.0 ? phase_quantity(static_cast<double>(cfg.data.n), cell.mu, cfg.data.sigma_p,
                                       static_cast<double>(cell.d))
                      : 0.0;
    cell.binarized = cell.mean_error > cfg.cutoff ? 1 : 0;
    result.cells.push_back(cell);
  }
  return result;
}

std::vector<std::pair<std::pair<std::size_t, double>, int>> cut_heatmap(const std::vector<HeatmapRow>& rows,
                                                                        double cutoff) {
  std::vector<std::pair<std::pair<std::size_t, double>, int>> out;
  for (const auto& r : rows) out.push_back({{r.d, r.mu}, r.mean_error > cutoff ? 1 : 0});
  return out;
}

std::vector<HeatmapRow> read_heatmap_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  std::vector<HeatmapRow> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    rows.push_back({static_cast<std::size_t>(t.integer(r, "d")), t.real(r, "mu"), t.real(r, "mean_error"),
                    t.real(r, "std_error"), t.real(r, "mean_final_loss"), t.real(r, "phase_quantity")});
  }
  return rows;
}

void write_sweep_artifacts(const SweepResult& result, double cutoff, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CsvTable heat;
  heat.header = {"d", "mu", "mean_error", "std_error", "mean_final_loss", "phase_quantity"};
  std::vector<HeatmapRow> rows;
  for (const auto& c : result.cells) {
    heat.rows.push_back({std::to_string(c.d), format_real(c.mu), format_real(c.mean_error), format_real(c.std_error),
                         format_real(c.mean_final_loss), format_real(c.phase_quantity)});
    rows.push_back({c.d, c.mu, c.mean_error, c.std_error, c.mean_final_loss, c.phase_quantity});
  }
  write_csv(dir / "heatmap.csv", heat);

  CsvTable cut;
  cut.header = {"d", "mu", "value"};
  for (const auto& [key, v] : cut_heatmap(rows, cutoff)) {
    cut.rows.push_back({std::to_string(key.first), format_real(key.second), std::to_string(v)});
  }
  write_csv(dir / "heatmap_cut.csv", cut);

  CsvTable reps;
  reps.header = {"d", "mu", "rep", "seed", "status", "final_loss", "test_error"};
  for (const auto& r : result.replicates) {
    reps.rows.push_back({std::to_string(r.d), format_real(r.mu), std::to_string(r.rep), std::to_string(r.seed),
                         r.failed ? "diverged" : "ok", r.failed ? "" : format_real(r.final_loss),
                         r.failed ? "" : format_real(r.test_error)});
  }
  write_csv(dir / "replicates.csv", reps);
}

std::vector<LineCheck> check_phase_map(const SweepResult& result) {
  std::map<std::size_t, std::vector<const SweepCell*>> rows;  // by d, ordered by mu
  std::map<double, std::vector<const SweepCell*>> cols;       // by mu, ordered by d
  for (const auto& c : result.cells) {
    rows[c.d].push_back(&c);
    cols[c.mu].push_back(&c);
  }
  auto scan = [](std::vector<const SweepCell*> line, bool by_mu, const std::string& label) {
    std::sort(line.begin(), line.end(), [by_mu](const SweepCell* a, const SweepCell* b) {
      return by_mu ? a->mu < b->mu : a->d < b->d;
    });
    LineCheck lc{label, 0, 0};
    for (std::size_t k = 1; k < line.size(); ++k) {
      const SweepCell& a = *line[k - 1];
      const SweepCell& b = *line[k];
      // Along mu the map should fall; along d it should rise.
      const bool violated = by_mu ? b.binarized > a.binarized : b.binarized < a.binarized;
      if (!violated) continue;
      ++lc.violations;
      const double slack = 2.0 * std::max(a.std_error, b.std_error);
      if (!(std::abs(b.mean_error - a.mean_error) <= slack)) ++lc.unexcused;
    }
    return lc;
  };
  std::vector<LineCheck> out;
  for (const auto& [d, line] : rows) out.push_back(scan(line, true, "d=" + std::to_string(d)));
  for (const auto& [mu, line] : cols) out.push_back(scan(line, false, "mu=" + format_real(mu)));
  return out;
}

std::size_t phase_order_violations(const SweepResult& result) {
  std::vector<const SweepCell*> cells;
  for (const auto& c : result.cells) cells.push_back(&c);
  std::stable_sort(cells.begin(), cells.end(),
                   [](const SweepCell* a, const SweepCell* b) { return a->phase_quantity < b->phase_quantity; });
  std::size_t count = 0;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    const double rise = cells[k]->mean_error - cells[k - 1]->mean_error;
    if (rise > 2.0 * std::max(cells[k]->std_error, cells[k - 1]->std_error)) ++count;
  }
  return count;
}

}  // namespace benignlab
