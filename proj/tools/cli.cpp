#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "CLI11.hpp"
#include "benignlab/csv.hpp"
#include "benignlab/experiment.hpp"

namespace benignlab {
namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

// Flags seen on the command line, keyed by config key, in argument order.
struct Overrides {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_file, "key=value configuration file");
  for (const auto& key : config_keys()) {
    cmd->add_option_function<std::string>(
        flag_name(key), [&ov, key](const std::string& v) { ov.values[key] = v; }, "override '" + key + "'");
  }
}

ExperimentConfig resolve(const Overrides& ov) {
  ExperimentConfig cfg;
  if (!ov.config_file.empty()) apply_config_file(cfg, ov.config_file);
  for (const auto& [k, v] : ov.values) apply_setting(cfg, k, v);
  validate(cfg);
  return cfg;
}

void print_report(const InvariantReport& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    out << "  " << to_string(c.status) << "  " << c.name << "  observed=" << format_real(c.observed)
        << " bound=" << format_real(c.bound);
    if (c.status != CheckStatus::Pass && c.witness) {
      out << "  at t=" << c.witness->t;
      for (const auto& [name, idx] : c.witness->indices) out << " " << name << "=" << idx;
    }
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << "\n";
  }
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const RunOutcome o = run_experiment(cfg, true);
  write_run_artifacts(o, cfg.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& last = o.run.iterations.back();
  out << "iterations: " << o.run.final_t << " (" << to_string(o.run.stop_reason) << ")\n"
      << "final loss: " << format_real(last.loss) << "\n"
      << "test error: " << format_real(o.evaluation.estimate) << " +- " << format_real(o.evaluation.std_err)
      << " over " << o.evaluation.count << " points\n"
      << "margin spread: " << format_real(last.max_margin - last.min_margin) << "\n"
      << "phase quantity: " << format_real(o.phase_quantity) << "\n"
      << "invariants:\n";
  print_report(o.invariants, out);
  out << "artifacts: " << cfg.out.string() << " (" << format_real(secs) << " s)\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const SweepResult result = run_sweep(cfg);
  write_sweep_artifacts(result, cfg.cutoff, cfg.out);
  for (const auto& c : result.cells) {
    out << "d=" << c.d << " mu=" << format_real(c.mu) << " error=" << format_real(c.mean_error) << " +- "
        << format_real(c.std_error) << " cut=" << c.binarized;
    if (c.failed) out << " failed=" << c.failed;
    out << "\n";
  }
  for (const auto& line : check_phase_map(result)) {
    if (!line.passed()) {
      out << "non-monotone line " << line.line << ": " << line.violations << " flips, " << line.unexcused
          << " beyond noise\n";
    }
  }
  if (result.any_failed()) {
    for (const auto& r : result.replicates) {
      if (r.failed) err << "diverged: d=" << r.d << " mu=" << format_real(r.mu) << " rep=" << r.rep << ": " << r.failure << "\n";
    }
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_check(const std::string& dir, std::ostream& out) {
  const InvariantReport report = check_run_directory(dir);
  print_report(report, out);
  out << (report.passed() ? "all hard checks pass\n" : "hard check failure\n");
  return report.passed() ? kExitOk : kExitInvariant;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-layer ReLU CNN benign overfitting lab"};
  app.name("benignlab");
  app.require_subcommand(1);

  Overrides run_ov;
  Overrides sweep_ov;
  std::string check_dir;
  CLI::App* run = app.add_subcommand("run", "train one network and write all artifacts");
  CLI::App* sweep = app.add_subcommand("sweep", "test-error heatmap over the (d, mu) grid");
  CLI::App* check = app.add_subcommand("check", "replay the invariant checks on a run directory");
  add_config_flags(run, run_ov);
  add_config_flags(sweep, sweep_ov);
  check->add_option("dir", check_dir, "run artifact directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(resolve(run_ov), out);
    if (*sweep) return cmd_sweep(resolve(sweep_ov), out, err);
    return cmd_check(check_dir, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const MissingArtifacts& e) {
    err << e.what() << "\n";
    return kExitMissingArtifacts;
  } catch (const CsvError& e) {
    err << "bad artifact: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace benignlab
