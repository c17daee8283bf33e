#include "benignlab/gd_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "benignlab/csv.hpp"

namespace benignlab {

std::string to_string(StopReason r) {
  return r == StopReason::EpsilonReached ? "epsilon-reached" : "max-iters";
}

namespace {

IterationRecord make_record(std::size_t t, const BatchPass& pass) {
  IterationRecord rec;
  rec.t = t;
  rec.loss = pass.loss;
  rec.margins = pass.margins;
  rec.logit_derivs = pass.logit_derivs;
  rec.max_margin = *std::max_element(pass.margins.begin(), pass.margins.end());
  rec.min_margin = *std::min_element(pass.margins.begin(), pass.margins.end());
  return rec;
}

}  // namespace

RunRecord train(const Dataset& data, const Weights& w0, const DataConfig& data_config,
                const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (w0.m() != config.m) throw std::invalid_argument("train: weights width differs from config.m");

  RunRecord run;
  run.data_config = data_config;
  run.train_config = config;
  run.initial_weights = w0;

  Weights w = w0;
  BatchPass pass = evaluate_batch(w, data);
  for (auto* obs : hooks.observers) obs->on_start(w, pass);

  for (std::size_t t = 0;; ++t) {
    if (!std::isfinite(pass.loss)) throw DivergenceError(t, "non-finite training loss");

    const bool converged = pass.loss <= config.epsilon;
    const bool last = converged || t == config.max_iters;
    if (t % config.record_every == 0 || last) {
      IterationRecord rec = make_record(t, pass);
      if (hooks.test_error) rec.test_error = hooks.test_error(w);
      run.iterations.push_back(std::move(rec));
      for (auto* obs : hooks.observers) obs->on_record(t, w, pass);
    }
    if (last) {
      run.final_t = t;
      run.stop_reason = converged ? StopReason::EpsilonReached : StopReason::MaxIters;
      break;
    }

    Weights next = gd_step_from(pass, w, data, config.eta);
    if (!next.all_finite()) throw DivergenceError(t + 1, "non-finite weights");
    for (auto* obs : hooks.observers) obs->on_step(StepView{t, w, next, pass});
    w = std::move(next);
    pass = evaluate_batch(w, data);
  }
  run.final_weights = std::move(w);
  return run;
}

std::vector<MarginPoint> margin_series(const RunRecord& run) {
  std::vector<MarginPoint> out;
  for (const auto& rec : run.iterations) {
    if (rec.margins.empty()) throw std::invalid_argument("margin_series: margins not recorded");
    out.push_back({rec.t, rec.max_margin, rec.min_margin, rec.max_margin - rec.min_margin});
  }
  return out;
}

void write_run_csv(const std::filesystem::path& path, const RunRecord& run) {
  CsvTable t;
  t.header = {"t", "loss", "max_margin", "min_margin", "spread", "test_error"};
  for (const auto& rec : run.iterations) {
    t.rows.push_back({std::to_string(rec.t), format_real(rec.loss), format_real(rec.max_margin),
                      format_real(rec.min_margin), format_real(rec.max_margin - rec.min_margin),
                      rec.test_error ? format_real(*rec.test_error) : std::string()});
  }
  write_csv(path, t);
}

void write_margins_csv(const std::filesystem::path& path, const RunRecord& run) {
  CsvTable t;
  t.header = {"t", "i", "margin", "logit_deriv"};
  for (const auto& rec : run.iterations) {
    for (std::size_t i = 0; i < rec.margins.size(); ++i) {
      t.rows.push_back({std::to_string(rec.t), std::to_string(i), format_real(rec.margins[i]),
                        format_real(rec.logit_derivs[i])});
    }
  }
  write_csv(path, t);
}

std::vector<IterationRecord> read_iteration_records(const std::filesystem::path& run_csv,
                                                    const std::filesystem::path& margins_csv) {
  const CsvTable runs = read_csv(run_csv);
  const CsvTable margins = read_csv(margins_csv);
  std::vector<IterationRecord> out;
  std::map<long long, std::size_t> by_t;
  for (std::size_t r = 0; r < runs.rows.size(); ++r) {
    IterationRecord rec;
    rec.t = static_cast<std::size_t>(runs.integer(r, "t"));
    rec.loss = runs.real(r, "loss");
    rec.max_margin = runs.real(r, "max_margin");
    rec.min_margin = runs.real(r, "min_margin");
    if (!runs.cell(r, "test_error").empty()) rec.test_error = runs.real(r, "test_error");
    by_t[static_cast<long long>(rec.t)] = out.size();
    out.push_back(std::move(rec));
  }
  for (std::size_t r = 0; r < margins.rows.size(); ++r) {
    auto it = by_t.find(margins.integer(r, "t"));
    if (it == by_t.end()) throw CsvError("margins.csv references an unrecorded iteration");
    auto& rec = out[it->second];
    const auto i = static_cast<std::size_t>(margins.integer(r, "i"));
    if (rec.margins.size() <= i) {
      rec.margins.resize(i + 1);
      rec.logit_derivs.resize(i + 1);
    }
    rec.margins[i] = margins.real(r, "margin");
    rec.logit_derivs[i] = margins.real(r, "logit_deriv");
  }
  return out;
}

}  // namespace benignlab
