// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "benignlab/experiment.hpp"

using namespace benignlab;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CheckResult& need(const InvariantReport& rep, const std::string& name) {
  static const CheckResult missing{"missing", CheckStatus::Fail, 0, 0, std::nullopt, "check not run"};
  const CheckResult* c = rep.find(name);
  return c ? *c : missing;
}

std::string describe(const CheckResult& c) {
  std::string s = c.name + "=" + to_string(c.status) + " (observed " + fmt("%.6g", c.observed) + ", bound " +
                  fmt("%.6g", c.bound);
  if (c.status == CheckStatus::Fail && c.witness) s += ", first witness t=" + std::to_string(c.witness->t);
  return s + ")";
}

// Central differences on coordinates whose filter has every |pre-activation|
// above 1e-3, so the +-h probe cannot cross a ReLU kink.
void gradient_check(const Weights& w, const Dataset& data) {
  const BatchPass pass = evaluate_batch(w, data);
  const Weights g = gradient_from(pass, w, data);
  auto kink_free = [&](std::size_t bank, std::size_t r) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (int patch : {1, 2}) {
        if (std::abs(pass.pre(bank, r, i, patch)) <= 1e-3) return false;
      }
    }
    return true;
  };
  Rng pick(20240601);
  const double h = 1e-6;
  double worst = 0.0;
  int checked = 0, attempts = 0;
  while (checked < 100 && attempts < 100000) {
    ++attempts;
    const auto k = static_cast<std::size_t>(pick.uniform() * static_cast<double>(w.flat().size()));
    const std::size_t filter = k / w.d();
    if (!kink_free(filter / w.m(), filter % w.m())) continue;
    Weights plus = w, minus = w;
    plus.flat()[k] += h;
    minus.flat()[k] -= h;
    const double fd = (training_loss(plus, data) - training_loss(minus, data)) / (2 * h);
    const double an = g.flat()[k];
    const double scale = std::max(std::abs(fd), std::abs(an));
    worst = std::max(worst, scale > 0 ? std::abs(fd - an) / scale : 0.0);
    ++checked;
  }
  report(7, "gradient vs central differences", checked == 100 && worst < 1e-5,
         std::to_string(checked) + " kink-free coordinates, worst relative error " + fmt("%.3g", worst) +
             " (< 1e-5)");
}

}  // namespace

int main() {
  // Single run: n=20, d=100, mu=5, sigma_p=1, p=0.1, m=10, eta=0.1, sigma_0=0.01, 100 iterations, 1000 test points.
  ExperimentConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const RunOutcome run = run_experiment(cfg, true);
  const double run_secs = seconds_since(t0);
  const double final_loss = run.run.iterations.back().loss;
  const double err = run.evaluation.estimate;
  {
    const bool loss_ok = final_loss < 0.01;
    const bool err_ok = err >= 0.06 && err <= 0.15;
    const bool time_ok = run_secs < 10.0;
    report(1, "single-run fit", loss_ok && err_ok && time_ok,
           "final training loss " + fmt("%.4g", final_loss) + (loss_ok ? " < 0.01" : " NOT < 0.01") +
               "; test error " + fmt("%.3f", err) + (err_ok ? " in" : " NOT in") + " [0.06, 0.15]; runtime " +
               fmt("%.2f", run_secs) + " s" + (time_ok ? " < 10 s" : " NOT < 10 s"));
  }
  {
    double spread = 0.0;
    std::size_t at = 0;
    for (const auto& p : margin_series(run.run)) {
      if (p.spread > spread) {
        spread = p.spread;
        at = p.t;
      }
    }
    report(2, "margin spread", spread <= 6.0,
           "max over t of (max - min) y_i f = " + fmt("%.4f", spread) + " at t=" + std::to_string(at) + " (<= 6)");
  }

  // Coarse phase map.
  ExperimentConfig grid;
  grid.d_values = {100, 400, 700, 1100};
  grid.mu_values = {1, 3, 5, 7, 9, 11};
  grid.replications = 3;
  grid.cutoff = 0.2;
  const auto t1 = std::chrono::steady_clock::now();
  const SweepResult sweep = run_sweep(grid);
  const double sweep_secs = seconds_since(t1);
  for (const auto& c : sweep.cells) {
    std::printf("    d=%-5zu mu=%-3g error=%.4f +- %.4f  phase=%-10.4g cut=%d\n", c.d, c.mu, c.mean_error, c.std_error,
                c.phase_quantity, c.binarized);
  }
  const SweepCell* harmful = nullptr;
  for (const auto& c : sweep.cells) {
    if (c.d == 1100 && c.mu == 1.0) harmful = &c;
  }
  {
    const bool a = harmful && harmful->mean_error > 0.2;
    std::string b_detail;
    bool b = true;
    for (const auto& c : sweep.cells) {
      if (c.phase_quantity >= 125.0 && !(c.mean_error <= 0.2)) {
        b = false;
        b_detail += " d=" + std::to_string(c.d) + ",mu=" + fmt("%g", c.mu);
      }
    }
    bool lines_ok = true;
    std::string c_detail;
    for (const auto& l : check_phase_map(sweep)) {
      if (!l.passed()) {
        lines_ok = false;
        c_detail += " " + l.line;
      }
    }
    const bool time_ok = sweep_secs < 300.0;
    report(3, "phase map", a && b && lines_ok && time_ok && !sweep.any_failed(),
           std::string("(a) harmful corner error ") + (harmful ? fmt("%.3f", harmful->mean_error) : "n/a") +
               (a ? " > 0.2" : " NOT > 0.2") + "; (b) benign cells " + (b ? "all <= 0.2" : "above cutoff:" + b_detail) +
               "; (c) monotone lines " + (lines_ok ? "ok" : "broken:" + c_detail) + "; runtime " +
               fmt("%.1f", sweep_secs) + " s" + (time_ok ? " < 300 s" : " NOT < 300 s"));
  }
  report(4, "harmful-regime error floor", harmful && harmful->mean_error >= 0.2,
         "mean error at (mu=1, d=1100) " + (harmful ? fmt("%.3f", harmful->mean_error) : std::string("n/a")) +
             " (>= p + 0.1 = 0.2)");

  {
    const InvariantReport& inv = run.invariants;
    const char* names[] = {"zeta_nondecreasing",     "omega_nonincreasing",     "gamma_strictly_increasing",
                           "persistence_neuron_sets", "persistence_sample_sets", "zeta_balance",
                           "ratio_band"};
    bool ok = true;
    std::string detail;
    for (const char* n : names) {
      const CheckResult& c = need(inv, n);
      ok = ok && c.status == CheckStatus::Pass;
      detail += (detail.empty() ? "" : "; ") + describe(c);
    }
    report(5, "coefficient invariants", ok, detail);
  }
  {
    const CheckResult& agree = need(run.invariants, "dual_track_agreement");
    const CheckResult& resid = need(run.invariants, "reconstruction_residual");
    double worst_rel = 0.0;
    for (const auto& p : run.dual_track) worst_rel = std::max(worst_rel, p.agreement.worst);
    report(6, "stepped vs recovered coefficients",
           agree.status == CheckStatus::Pass && resid.status == CheckStatus::Pass && run.dual_track.size() == 101,
           std::to_string(run.dual_track.size()) + " recorded iterations; worst normalized disagreement " +
               fmt("%.3g", worst_rel) + " (<= 1 at 1e-6 relative); residual " + fmt("%.3g", resid.observed) +
               " (< 1e-8); Gram condition " + fmt("%.3g", run.basis_condition));
  }

  gradient_check(run.run.final_weights, run.data);

  {
    const double residual = error_decomposition_check(run.evaluation, cfg.data.p);
    report(8, "error decomposition", residual <= 3 * run.evaluation.std_err,
           "|total - (p + (1-2p) clean)| = " + fmt("%.4g", residual) + " (<= 3 std_err = " +
               fmt("%.4g", 3 * run.evaluation.std_err) + ")");
  }

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
