#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "benignlab/relu_cnn.hpp"
#include "benignlab/synth_data.hpp"

namespace benignlab {

struct IterationRecord {
  std::size_t t = 0;
  double loss = 0.0;
  std::vector<double> margins;       // y_i f(W^(t), x_i)
  std::vector<double> logit_derivs;  // l'_i
  double max_margin = 0.0;
  double min_margin = 0.0;
  std::optional<double> test_error;

  bool operator==(const IterationRecord&) const = default;
};

enum class StopReason { EpsilonReached, MaxIters };
std::string to_string(StopReason r);

struct RunRecord {
  DataConfig data_config;
  TrainConfig train_config;
  std::vector<IterationRecord> iterations;
  Weights initial_weights;
  Weights final_weights;
  std::size_t final_t = 0;
  StopReason stop_reason = StopReason::MaxIters;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : std::runtime_error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

// One GD step t -> t+1. `pass` is the evaluation of `before` that produced
// `after`; observers never see a recomputed copy.
struct StepView {
  std::size_t t;
  const Weights& before;
  const Weights& after;
  const BatchPass& pass;
};

class TrainingObserver {
 public:
  virtual ~TrainingObserver() = default;
  // Called once before the first step with W^(0).
  virtual void on_start(const Weights& /*w0*/, const BatchPass& /*pass0*/) {}
  // Called whenever iteration t is recorded (t = 0, every stride, and the last).
  virtual void on_record(std::size_t /*t*/, const Weights& /*w*/, const BatchPass& /*pass*/) {}
  // Called after every step.
  virtual void on_step(const StepView& /*step*/) {}
};

struct TrainHooks {
  std::vector<TrainingObserver*> observers;
  // Optional test-error probe evaluated at recorded iterations.
  std::function<double(const Weights&)> test_error;
};

// Full-batch GD from `w0` until loss <= epsilon or t == max_iters.
// Throws DivergenceError on a non-finite loss or weight.
RunRecord train(const Dataset& data, const Weights& w0, const DataConfig& data_config,
                const TrainConfig& config, const TrainHooks& hooks = {});

struct MarginPoint {
  std::size_t t;
  double max_margin;
  double min_margin;
  double spread;
};

std::vector<MarginPoint> margin_series(const RunRecord& run);

// run.csv: t,loss,max_margin,min_margin,spread,test_error
void write_run_csv(const std::filesystem::path& path, const RunRecord& run);
// margins.csv: t,i,margin,logit_deriv
void write_margins_csv(const std::filesystem::path& path, const RunRecord& run);

// Rebuilds iteration records (t, loss, margins, logit derivatives, test error)
// from run.csv + margins.csv.
std::vector<IterationRecord> read_iteration_records(const std::filesystem::path& run_csv,
                                                    const std::filesystem::path& margins_csv);

}  // namespace benignlab
