#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "benignlab/gd_trainer.hpp"
#include "benignlab/relu_cnn.hpp"
#include "benignlab/synth_data.hpp"

namespace benignlab {

// Signal-noise coefficients of W^(t) - W^(0):
//   w_{j,r}^(t) = w_{j,r}^(0) + j gamma_{j,r} mu/||mu||^2 + sum_i rho_{j,r,i} xi_i/||xi_i||^2
// with rho = zeta + omega, zeta >= 0 and omega <= 0.
struct Coefficients {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> gamma;  // [bank][r]
  std::vector<double> zeta;   // [bank][r][i]
  std::vector<double> omega;  // [bank][r][i]

  Coefficients() = default;
  Coefficients(std::size_t m_, std::size_t n_)
      : m(m_), n(n_), gamma(2 * m_, 0.0), zeta(2 * m_ * n_, 0.0), omega(2 * m_ * n_, 0.0) {}

  std::size_t gi(std::size_t bank, std::size_t r) const { return bank * m + r; }
  std::size_t ri(std::size_t bank, std::size_t r, std::size_t i) const { return (bank * m + r) * n + i; }
  double rho(std::size_t bank, std::size_t r, std::size_t i) const {
    return zeta[ri(bank, r, i)] + omega[ri(bank, r, i)];
  }
  bool operator==(const Coefficients&) const = default;
};

class IllConditionedBasis : public std::runtime_error {
 public:
  IllConditionedBasis(double condition, const std::string& what)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// Scaled basis {mu/||mu||^2, xi_1/||xi_1||^2, ..., xi_n/||xi_n||^2} with its
// Gram matrix factorized once.
class Basis {
 public:
  static constexpr double kMaxCondition = 1e12;
  static constexpr double kTightCondition = 1e8;

  // Throws IllConditionedBasis when cond(Gram) > kMaxCondition.
  Basis(std::span<const double> mu, const Dataset& data);
  ~Basis();
  Basis(Basis&&) noexcept;
  Basis& operator=(Basis&&) noexcept;

  std::size_t n() const { return noise_sq_.size(); }
  std::size_t d() const { return mu_.size(); }
  double condition() const { return condition_; }
  double mu_sq() const { return mu_sq_; }
  double noise_sq(std::size_t i) const { return noise_sq_[i]; }
  std::span<const double> mu() const { return mu_; }
  std::span<const double> xi(std::size_t i) const { return {xis_.data() + i * d(), d()}; }

  // Coordinates c of v in the scaled basis (c[0] on mu, c[1+i] on xi_i) and
  // the Euclidean reconstruction residual.
  std::vector<double> solve(std::span<const double> v, double* residual = nullptr) const;

 private:
  struct Factor;
  std::vector<double> mu_;
  std::vector<double> xis_;  // [i][coord]
  double mu_sq_ = 0.0;
  std::vector<double> noise_sq_;
  double condition_ = 0.0;
  std::unique_ptr<Factor> factor_;
};

struct RecoveredCoefficients {
  Coefficients coeffs;
  double max_residual = 0.0;           // max_{j,r} ||reconstruction - (w^(t) - w^(0))||
  double max_relative_residual = 0.0;  // residual / max(1, ||w^(t) - w^(0)||)
};

// Solves for the coefficients of each filter displacement; zeta/omega are the
// sign split of the solved rho.
RecoveredCoefficients recover_coefficients(const Weights& w_t, const Weights& w_0, const Basis& basis);

// Per-(j,r) aggregate of one gamma update:
//   sum_{i in S+} l'_i sigma'(<w, y_hat_i mu>) - sum_{i in S-} l'_i sigma'(<w, y_hat_i mu>)
struct GammaStep {
  std::size_t t = 0;  // step t -> t+1
  std::vector<double> aggregate;
  std::vector<double> delta;
  bool operator==(const GammaStep&) const = default;
};

// One application of the coefficient recurrences using the logit derivatives
// and activation bits of `pass`. zeta only moves for y_i = j, omega only for
// y_i = -j. `step` (optional) receives the gamma aggregates.
Coefficients step_coefficients(const Coefficients& c, const BatchPass& pass, const Basis& basis,
                               const Dataset& data, double eta, GammaStep* step = nullptr);

struct CoefficientSummary {
  int j = 1;
  std::size_t r = 0;
  double gamma = 0.0;
  double sum_zeta = 0.0;
  double max_zeta = 0.0;
  double min_omega = 0.0;
  std::optional<double> ratio;  // gamma / sum_zeta, absent when sum_zeta == 0
};

std::vector<CoefficientSummary> coefficient_summaries(const Coefficients& c);

// Entry-wise agreement of two coefficient sets. An entry passes when
// |a - b| <= max(rel * max(|a|, |b|), abs_floor); `worst` is the largest
// |a - b| / max(rel * max(|a|, |b|), abs_floor), so <= 1 means agreement.
struct Agreement {
  double worst = 0.0;
  double max_abs_diff = 0.0;
};
Agreement compare_coefficients(const Coefficients& a, const Coefficients& b, double rel = 1e-6,
                               double abs_floor = 1e-9);

struct CoefficientHistory {
  std::vector<std::size_t> t;
  std::vector<Coefficients> snapshots;
  std::vector<GammaStep> steps;
};

struct DualTrackPoint {
  std::size_t t = 0;
  Agreement agreement;
  double relative_residual = 0.0;
};

// Observer that advances the recurrences with the trainer's own pass at every
// step and, at recorded iterations, snapshots them and (optionally) compares
// against the span-recovered coefficients.
class CoefficientTracker : public TrainingObserver {
 public:
  CoefficientTracker(const Dataset& data, std::span<const double> mu, double eta, bool verify = true);

  void on_start(const Weights& w0, const BatchPass& pass0) override;
  void on_record(std::size_t t, const Weights& w, const BatchPass& pass) override;
  void on_step(const StepView& step) override;

  const Basis& basis() const { return basis_; }
  const Coefficients& current() const { return current_; }
  const CoefficientHistory& history() const { return history_; }
  const std::vector<DualTrackPoint>& dual_track() const { return dual_; }

 private:
  const Dataset& data_;
  Basis basis_;
  double eta_;
  bool verify_;
  Weights w0_;
  Coefficients current_;
  CoefficientHistory history_;
  std::vector<DualTrackPoint> dual_;
};

// coeffs.csv: t,j,r,gamma,sum_zeta,min_omega,max_zeta,ratio
void write_coeffs_csv(const std::filesystem::path& path, const CoefficientHistory& h);
// rho.csv: t,j,r,i,zeta,omega
void write_rho_csv(const std::filesystem::path& path, const CoefficientHistory& h);
// gamma_steps.csv: t,j,r,aggregate,delta
void write_gamma_steps_csv(const std::filesystem::path& path, const CoefficientHistory& h);

// Rebuilds snapshots from coeffs.csv (gamma) and rho.csv (zeta, omega), and
// steps from gamma_steps.csv.
CoefficientHistory read_coefficient_history(const std::filesystem::path& coeffs_csv,
                                            const std::filesystem::path& rho_csv,
                                            const std::filesystem::path& gamma_steps_csv);

}  // namespace benignlab
