#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "benignlab/decomposition.hpp"
#include "benignlab/gd_trainer.hpp"
#include "benignlab/synth_data.hpp"

namespace benignlab {

enum class CheckStatus { Pass, Fail, Warn };
std::string to_string(CheckStatus s);

struct Witness {
  std::size_t t = 0;
  std::vector<std::pair<std::string, long long>> indices;
  double value = 0.0;
  bool operator==(const Witness&) const = default;
};

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double bound = 0.0;
  double observed = 0.0;  // worst value seen, in the units of `bound`
  std::optional<Witness> witness;
  std::string note;
  bool operator==(const CheckResult&) const = default;
};

struct InvariantReport {
  std::vector<CheckResult> checks;

  bool passed() const;  // no Fail entries
  const CheckResult* find(const std::string& name) const;
  void append(const InvariantReport& other);
  std::string to_json() const;
  bool operator==(const InvariantReport&) const = default;
};

// Members of the noise-activation sets at one recorded iteration:
// bit (j, r, i) is set iff y_i = j and <w_{j,r}, xi_i> > 0.
struct ActivationHistory {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<int> labels;
  std::vector<std::size_t> t;
  std::vector<std::vector<std::uint8_t>> bits;  // [record][(bank*m + r)*n + i]

  bool active(std::size_t record, std::size_t bank, std::size_t r, std::size_t i) const {
    return bits[record][(bank * m + r) * n + i] != 0;
  }
  // S_i = {r : <w_{y_i,r}, xi_i> > 0}
  std::vector<std::size_t> neuron_set(std::size_t record, std::size_t i) const;
  // S_{j,r} = {i : y_i = j, <w_{j,r}, xi_i> > 0}
  std::vector<std::size_t> sample_set(std::size_t record, std::size_t bank, std::size_t r) const;
};

class ActivationRecorder : public TrainingObserver {
 public:
  explicit ActivationRecorder(const Dataset& data);
  void on_start(const Weights& w0, const BatchPass& pass0) override;
  void on_record(std::size_t t, const Weights& w, const BatchPass& pass) override;
  const ActivationHistory& history() const { return history_; }

 private:
  const Dataset& data_;
  ActivationHistory history_;
};

// activations.csv: t,j,r,i,active (rows only for y_i = j)
void write_activations_csv(const std::filesystem::path& path, const ActivationHistory& h);
ActivationHistory read_activations_csv(const std::filesystem::path& path, const std::vector<int>& labels);

struct MonitorSettings {
  double monotone_tol = 1e-12;
  double band_factor = 10.0;
  double warmup_loss = 0.5;  // ratio band applies from the first t with loss below this
  double kappa = 3.25;       // zeta-balance bound
  double c4 = 5.0;           // margin-difference bound; logit ratio bound is exp(c4)
  double figure_spread = 6.0;
};

// zeta nondecreasing, omega nonincreasing (within tol), and gamma strictly
// increasing on every step whose gamma aggregate is nonzero.
InvariantReport check_monotonicity(const CoefficientHistory& h, double tol = 1e-12);

// zeta >= 0, omega <= 0, zeta_{j,r,i} = 0 for y_i != j, omega_{j,r,i} = 0 for y_i == j.
InvariantReport check_coefficient_structure(const CoefficientHistory& h, const std::vector<int>& labels);

// gamma / sum_i zeta within [1/band, band] * mu^2 / (sigma_p^2 d) for recorded
// t >= t_check (and t > 0).
InvariantReport check_ratio_band(const CoefficientHistory& h, double mu_norm, double sigma_p, std::size_t d,
                                 double band_factor, std::size_t t_check);

// First recorded t with loss < threshold.
std::optional<std::size_t> warmup_index(const std::vector<IterationRecord>& iterations, double threshold);

// Margin differences <= c4, logit-derivative ratios <= exp(c4), zeta balance
// <= kappa, and the elementary l' ratio bounds against the margin gap.
InvariantReport check_balanced_logits(const std::vector<IterationRecord>& iterations, const CoefficientHistory& h,
                                      const std::vector<int>& labels, double c4, double kappa);

// Empirical margin spread bound (max - min of y_i f at each recorded t).
InvariantReport check_margin_spread(const std::vector<IterationRecord>& iterations, double bound);

// S^(0) subset of S^(t) for both set families; initial sizes against 0.4 m
// and n/8 as warnings.
InvariantReport check_activation_persistence(const ActivationHistory& h);

// Stepped vs recovered coefficients and reconstruction residual.
InvariantReport check_dual_track(const std::vector<DualTrackPoint>& points, double condition);

struct ConditionClause {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool at_least = true;  // clause reads lhs >= rhs (else lhs <= rhs)
  double ratio = 0.0;    // lhs / rhs
  bool holds = false;
};

struct ConditionReport {
  double delta = 0.01;
  std::size_t t_star = 0;
  std::vector<ConditionClause> clauses;
  double phase_quantity = 0.0;
  std::string to_json() const;
};

// The six sufficient-overparameterization clauses with the absolute constant
// set to 1, evaluated at the given failure probability delta.
ConditionReport condition_report(const DataConfig& data, const TrainConfig& train, std::size_t t_star,
                                 double delta = 0.01);

struct RunHistories {
  std::vector<IterationRecord> iterations;
  CoefficientHistory coefficients;
  ActivationHistory activations;
  std::vector<int> labels;
};

// Every hard check above, with settings.
InvariantReport run_theory_checks(const RunHistories& h, const DataConfig& data, const MonitorSettings& settings);

}  // namespace benignlab
