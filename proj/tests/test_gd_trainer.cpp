#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "benignlab/gd_trainer.hpp"

using namespace benignlab;

namespace {

struct Fixture {
  DataConfig data_config;
  TrainConfig train_config;
  Dataset data;
  Weights w0;

  Fixture() {
    data = generate_dataset(data_config);
    w0 = init_weights(train_config.m, data_config.d, train_config.sigma_0, train_config.init_seed);
  }
};

// Recomputes the pass of `before` on a handful of steps and compares with
// what the trainer handed over.
class Recompute : public TrainingObserver {
 public:
  Recompute(const Dataset& data, std::set<std::size_t> steps, double eta)
      : data_(data), steps_(std::move(steps)), eta_(eta) {}
  void on_step(const StepView& s) override {
    if (!steps_.count(s.t)) return;
    ++checked;
    const BatchPass fresh = evaluate_batch(s.before, data_);
    if (!(fresh == s.pass)) ++mismatches;
    if (!(gd_step_from(fresh, s.before, data_, eta_) == s.after)) ++mismatches;
  }
  int checked = 0;
  int mismatches = 0;

 private:
  const Dataset& data_;
  std::set<std::size_t> steps_;
  double eta_;
};

}  // namespace

TEST(Train, HooksSeeTheStepsOwnPass) {
  Fixture f;
  Rng r(31);
  std::set<std::size_t> steps;
  while (steps.size() < 5) steps.insert(static_cast<std::size_t>(r.uniform() * 100));
  Recompute probe(f.data, steps, f.train_config.eta);
  TrainHooks hooks;
  hooks.observers = {&probe};
  train(f.data, f.w0, f.data_config, f.train_config, hooks);
  EXPECT_EQ(probe.checked, 5);
  EXPECT_EQ(probe.mismatches, 0);
}

TEST(Train, LargeEpsilonStopsImmediately) {
  Fixture f;
  f.train_config.epsilon = 10.0;
  const RunRecord run = train(f.data, f.w0, f.data_config, f.train_config);
  EXPECT_EQ(run.final_t, 0u);
  EXPECT_EQ(run.stop_reason, StopReason::EpsilonReached);
  ASSERT_EQ(run.iterations.size(), 1u);
  EXPECT_LE(run.iterations.back().loss, 10.0);
  EXPECT_EQ(run.final_weights, f.w0);
}

TEST(Train, ReachesMaxIters) {
  Fixture f;
  const RunRecord run = train(f.data, f.w0, f.data_config, f.train_config);
  EXPECT_EQ(run.final_t, 100u);
  EXPECT_EQ(run.stop_reason, StopReason::MaxIters);
  ASSERT_EQ(run.iterations.size(), 101u);
  for (std::size_t k = 0; k < run.iterations.size(); ++k) {
    const auto& rec = run.iterations[k];
    EXPECT_EQ(rec.t, k);
    EXPECT_EQ(rec.max_margin, *std::max_element(rec.margins.begin(), rec.margins.end()));
    EXPECT_EQ(rec.min_margin, *std::min_element(rec.margins.begin(), rec.margins.end()));
    for (double lp : rec.logit_derivs) {
      EXPECT_GT(lp, -1.0);
      EXPECT_LT(lp, 0.0);
    }
  }
  EXPECT_LT(run.iterations.back().loss, run.iterations.front().loss);
}

TEST(Train, StrideRecordsLastIteration) {
  Fixture f;
  f.train_config.max_iters = 25;
  f.train_config.record_every = 10;
  const RunRecord run = train(f.data, f.w0, f.data_config, f.train_config);
  std::vector<std::size_t> ts;
  for (const auto& rec : run.iterations) ts.push_back(rec.t);
  EXPECT_EQ(ts, (std::vector<std::size_t>{0, 10, 20, 25}));
}

TEST(Train, Deterministic) {
  Fixture f;
  const RunRecord a = train(f.data, f.w0, f.data_config, f.train_config);
  const RunRecord b = train(f.data, f.w0, f.data_config, f.train_config);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.final_weights, b.final_weights);
}

TEST(Train, DivergenceIsReported) {
  Fixture f;
  f.train_config.eta = 1e308;
  f.train_config.sigma_0 = 1.0;
  const Weights w0 = init_weights(f.train_config.m, f.data_config.d, 1.0, 3);
  try {
    train(f.data, w0, f.data_config, f.train_config);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.iteration(), 1u);
  }
}

TEST(Margins, SeriesMatchesRawMargins) {
  Fixture f;
  const RunRecord run = train(f.data, f.w0, f.data_config, f.train_config);
  const auto series = margin_series(run);
  ASSERT_EQ(series.size(), run.iterations.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& m = run.iterations[k].margins;
    const double mx = *std::max_element(m.begin(), m.end());
    const double mn = *std::min_element(m.begin(), m.end());
    EXPECT_EQ(series[k].spread, mx - mn);
  }
}

TEST(Margins, ZeroInitHasZeroSpread) {
  Fixture f;
  f.train_config.max_iters = 1;
  const RunRecord run = train(f.data, Weights(f.train_config.m, f.data_config.d), f.data_config, f.train_config);
  EXPECT_EQ(margin_series(run).front().spread, 0.0);
}

TEST(RunCsv, RoundTrip) {
  Fixture f;
  f.train_config.max_iters = 10;
  TrainHooks hooks;
  hooks.test_error = [](const Weights& w) { return w.flat()[0] > 0 ? 0.25 : 0.5; };
  const RunRecord run = train(f.data, f.w0, f.data_config, f.train_config, hooks);
  const auto dir = std::filesystem::temp_directory_path() / "benignlab_run_rt";
  std::filesystem::create_directories(dir);
  write_run_csv(dir / "run.csv", run);
  write_margins_csv(dir / "margins.csv", run);
  const auto back = read_iteration_records(dir / "run.csv", dir / "margins.csv");
  EXPECT_EQ(back, run.iterations);
  std::filesystem::remove_all(dir);
}
