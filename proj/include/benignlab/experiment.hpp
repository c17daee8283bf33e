#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "benignlab/decomposition.hpp"
#include "benignlab/evaluation.hpp"
#include "benignlab/gd_trainer.hpp"
#include "benignlab/relu_cnn.hpp"
#include "benignlab/synth_data.hpp"
#include "benignlab/theory_monitor.hpp"

namespace benignlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDivergence = 2,
  kExitInvariant = 3,
  kExitMissingArtifacts = 4,
};

// Invalid configuration; `key()` names the offending setting.
class UsageError : public std::invalid_argument {
 public:
  UsageError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class MissingArtifacts : public std::runtime_error {
 public:
  explicit MissingArtifacts(std::vector<std::string> files);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::vector<std::string> files_;
};

// Defaults reproduce the d = 100, ||mu|| = 5 single run.
struct ExperimentConfig {
  DataConfig data;  // data.seed is overwritten by the derived data seed
  TrainConfig train;
  std::size_t test_count = 1000;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  std::size_t workers = 1;

  std::vector<std::size_t> d_values{100, 300, 500, 700, 900, 1100};
  std::vector<double> mu_values{1, 3, 5, 7, 9, 11};
  std::size_t replications = 3;
  double cutoff = 0.2;

  MonitorSettings monitor;
  double delta = 0.01;  // failure probability used by the condition report

  ExperimentConfig();
};

// Every recognised key, in the order the resolved config is echoed.
const std::vector<std::string>& config_keys();

// Applies one key=value setting. Throws UsageError on an unknown key or a
// malformed/out-of-range value.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Flat key=value lines; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

// Range checks across keys (the per-module validate() calls plus grid checks).
void validate(const ExperimentConfig& cfg);

std::string render_config(const ExperimentConfig& cfg);

struct RunSeeds {
  std::uint64_t data;
  std::uint64_t init;
  std::uint64_t test;
};
RunSeeds run_seeds(std::uint64_t seed);

// Seed of replication `rep` of sweep cell (d, mu).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t d, double mu, std::size_t rep);

struct RunOutcome {
  ExperimentConfig config;
  Dataset data;
  std::vector<double> mu;
  RunRecord run;
  ErrorEstimate evaluation;
  double phase_quantity = 0.0;

  // Present when tracking is enabled.
  std::optional<CoefficientHistory> coefficients;
  std::vector<DualTrackPoint> dual_track;
  double basis_condition = 0.0;
  std::optional<ActivationHistory> activations;
  InvariantReport invariants;
  ConditionReport condition;
};

// data -> init -> train (with decomposition and activation tracking when
// `track`) -> evaluate -> monitor. Throws DivergenceError.
RunOutcome run_experiment(const ExperimentConfig& cfg, bool track = true);

// Writes every artifact of a tracked run into cfg.out.
void write_run_artifacts(const RunOutcome& outcome, const std::filesystem::path& dir);

// Files cmd_check needs.
const std::vector<std::string>& check_artifacts();

// Replays the theory checks from a run directory. Throws MissingArtifacts.
InvariantReport check_run_directory(const std::filesystem::path& dir);

struct SweepReplicate {
  std::size_t d = 0;
  double mu = 0.0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  double final_loss = 0.0;
  double test_error = 0.0;
};

struct SweepCell {
  std::size_t d = 0;
  double mu = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;  // sample standard deviation over replications
  double mean_final_loss = 0.0;
  double phase_quantity = 0.0;
  int binarized = 0;  // 1 iff mean_error > cutoff
  std::size_t failed = 0;
};

struct SweepResult {
  std::vector<SweepReplicate> replicates;  // (d, mu, rep) order
  std::vector<SweepCell> cells;            // (d, mu) order
  bool any_failed() const;
};

// Runs every (d, mu, rep) cell on up to cfg.workers threads.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_sweep_artifacts(const SweepResult& result, double cutoff, const std::filesystem::path& dir);

struct HeatmapRow {
  std::size_t d = 0;
  double mu = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
  double mean_final_loss = 0.0;
  double phase_quantity = 0.0;
};

std::vector<HeatmapRow> read_heatmap_csv(const std::filesystem::path& path);
// heatmap_cut.csv rows (d, mu, value) as a pure function of heatmap rows.
std::vector<std::pair<std::pair<std::size_t, double>, int>> cut_heatmap(const std::vector<HeatmapRow>& rows,
                                                                        double cutoff);

// Binarized-map monotonicity: along each d-row the cut value should not rise
// with mu; along each mu-column it should not fall with d. A violation between
// adjacent cells is excused when their mean errors differ by at most
// 2 * max(std). A line passes with at most one violation, which must be excused.
struct LineCheck {
  std::string line;  // "d=100" or "mu=5"
  std::size_t violations = 0;
  std::size_t unexcused = 0;
  bool passed() const { return violations <= 1 && unexcused == 0; }
};
std::vector<LineCheck> check_phase_map(const SweepResult& result);

// Cells ordered by phase quantity: count of adjacent pairs where the mean
// error rises by more than 2 * max(std) (diagnostic only).
std::size_t phase_order_violations(const SweepResult& result);

}  // namespace benignlab
