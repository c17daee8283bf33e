#include "benignlab/theory_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "benignlab/csv.hpp"
#include "json.hpp"

namespace benignlab {

using nlohmann::json;

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Warn: return "diagnostic-warn";
  }
  return "?";
}

bool InvariantReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* InvariantReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void InvariantReport::append(const InvariantReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

}  // namespace

std::string InvariantReport::to_json() const {
  json arr = json::array();
  for (const auto& c : checks) {
    json e{{"name", c.name}, {"status", to_string(c.status)}, {"bound", number(c.bound)},
           {"observed", number(c.observed)}};
    if (c.witness) {
      json idx = json::object();
      for (const auto& [k, v] : c.witness->indices) idx[k] = v;
      e["witness"] = {{"t", c.witness->t}, {"indices", idx}, {"value", number(c.witness->value)}};
    } else {
      e["witness"] = nullptr;
    }
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(std::move(e));
  }
  json root{{"passed", passed()}, {"checks", std::move(arr)}};
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Activation sets

std::vector<std::size_t> ActivationHistory::neuron_set(std::size_t record, std::size_t i) const {
  std::vector<std::size_t> out;
  const std::size_t bank = bank_index(labels[i]);
  for (std::size_t r = 0; r < m; ++r) {
    if (active(record, bank, r, i)) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> ActivationHistory::sample_set(std::size_t record, std::size_t bank, std::size_t r) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (active(record, bank, r, i)) out.push_back(i);
  }
  return out;
}

ActivationRecorder::ActivationRecorder(const Dataset& data) : data_(data) {}

void ActivationRecorder::on_start(const Weights& w0, const BatchPass& /*pass0*/) {
  history_ = {};
  history_.m = w0.m();
  history_.n = data_.size();
  for (const auto& pt : data_) history_.labels.push_back(pt.y);
}

void ActivationRecorder::on_record(std::size_t t, const Weights& /*w*/, const BatchPass& pass) {
  const std::size_t m = history_.m;
  const std::size_t n = history_.n;
  std::vector<std::uint8_t> bits(2 * m * n, 0);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        const DataPoint& pt = data_[i];
        bits[(b * m + r) * n + i] = pt.y == bank_sign(b) && pass.pre(b, r, i, 3 - pt.signal_slot) > 0.0;
      }
    }
  }
  history_.t.push_back(t);
  history_.bits.push_back(std::move(bits));
}

void write_activations_csv(const std::filesystem::path& path, const ActivationHistory& h) {
  CsvTable t;
  t.header = {"t", "j", "r", "i", "active"};
  for (std::size_t k = 0; k < h.t.size(); ++k) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < h.m; ++r) {
        for (std::size_t i = 0; i < h.n; ++i) {
          if (h.labels[i] != bank_sign(b)) continue;
          t.rows.push_back({std::to_string(h.t[k]), bank_sign(b) > 0 ? "+1" : "-1", std::to_string(r),
                            std::to_string(i), h.active(k, b, r, i) ? "1" : "0"});
        }
      }
    }
  }
  write_csv(path, t);
}

ActivationHistory read_activations_csv(const std::filesystem::path& path, const std::vector<int>& labels) {
  const CsvTable t = read_csv(path);
  ActivationHistory h;
  h.labels = labels;
  h.n = labels.size();
  for (std::size_t row = 0; row < t.rows.size(); ++row) {
    h.m = std::max<std::size_t>(h.m, static_cast<std::size_t>(t.integer(row, "r")) + 1);
  }
  std::map<long long, std::size_t> index;
  for (std::size_t row = 0; row < t.rows.size(); ++row) {
    const long long tt = t.integer(row, "t");
    auto [it, inserted] = index.try_emplace(tt, h.t.size());
    if (inserted) {
      h.t.push_back(static_cast<std::size_t>(tt));
      h.bits.emplace_back(2 * h.m * h.n, 0);
    }
    const long long j = t.integer(row, "j");
    if (j != 1 && j != -1) throw CsvError("activations.csv: j must be +1 or -1");
    const auto r = static_cast<std::size_t>(t.integer(row, "r"));
    const auto i = static_cast<std::size_t>(t.integer(row, "i"));
    if (i >= h.n) throw CsvError("activations.csv: sample index out of range");
    h.bits[it->second][(bank_index(static_cast<int>(j)) * h.m + r) * h.n + i] = t.integer(row, "active") != 0;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Coefficient checks

namespace {

Witness witness(std::size_t t, std::vector<std::pair<std::string, long long>> idx, double value) {
  return Witness{t, std::move(idx), value};
}

long long jl(std::size_t bank) { return bank_sign(bank); }
long long ll(std::size_t v) { return static_cast<long long>(v); }

}  // namespace

InvariantReport check_monotonicity(const CoefficientHistory& h, double tol) {
  CheckResult zeta{"zeta_nondecreasing", CheckStatus::Pass, -tol, INFINITY, std::nullopt, ""};
  CheckResult omega{"omega_nonincreasing", CheckStatus::Pass, tol, -INFINITY, std::nullopt, ""};
  CheckResult gamma{"gamma_strictly_increasing", CheckStatus::Pass, 0.0, INFINITY, std::nullopt, ""};

  for (std::size_t k = 1; k < h.snapshots.size(); ++k) {
    const Coefficients& prev = h.snapshots[k - 1];
    const Coefficients& cur = h.snapshots[k];
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < cur.m; ++r) {
        for (std::size_t i = 0; i < cur.n; ++i) {
          const double dz = cur.zeta[cur.ri(b, r, i)] - prev.zeta[prev.ri(b, r, i)];
          const double dw = cur.omega[cur.ri(b, r, i)] - prev.omega[prev.ri(b, r, i)];
          if (dz < zeta.observed) {
            zeta.observed = dz;
            if (dz < -tol) zeta.witness = witness(h.t[k], {{"j", jl(b)}, {"r", ll(r)}, {"i", ll(i)}}, dz);
          }
          if (dw > omega.observed) {
            omega.observed = dw;
            if (dw > tol) omega.witness = witness(h.t[k], {{"j", jl(b)}, {"r", ll(r)}, {"i", ll(i)}}, dw);
          }
        }
      }
    }
  }
  if (zeta.observed < -tol) zeta.status = CheckStatus::Fail;
  if (omega.observed > tol) omega.status = CheckStatus::Fail;
  if (h.snapshots.size() < 2) {
    zeta.observed = 0.0;
    omega.observed = 0.0;
    zeta.note = omega.note = "fewer than two snapshots";
  }

  std::size_t zero_steps = 0;
  for (const GammaStep& s : h.steps) {
    const std::size_t m = s.aggregate.size() / 2;
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t k = b * m + r;
        if (s.aggregate[k] == 0.0) {
          ++zero_steps;
          continue;
        }
        if (s.delta[k] < gamma.observed) {
          gamma.observed = s.delta[k];
          if (!(s.delta[k] > 0.0)) {
            gamma.witness = witness(s.t + 1, {{"j", jl(b)}, {"r", ll(r)}}, s.delta[k]);
          }
        }
      }
    }
  }
  if (gamma.witness) gamma.status = CheckStatus::Fail;
  if (!std::isfinite(gamma.observed)) {
    gamma.observed = 0.0;
    gamma.note = "no step with a nonzero gamma aggregate";
  } else {
    gamma.note = "observed is the minimum gamma increment; " + std::to_string(zero_steps) +
                 " (j,r,step) entries had a zero aggregate";
  }
  return {{zeta, omega, gamma}};
}

InvariantReport check_coefficient_structure(const CoefficientHistory& h, const std::vector<int>& labels) {
  CheckResult sign{"coefficient_sign_pattern", CheckStatus::Pass, 0.0, 0.0, std::nullopt,
                   "observed is the largest |violation| of zeta >= 0 or omega <= 0"};
  CheckResult zeros{"coefficient_structural_zeros", CheckStatus::Pass, 0.0, 0.0, std::nullopt,
                    "observed is the largest |zeta| with y_i != j or |omega| with y_i == j"};
  for (std::size_t k = 0; k < h.snapshots.size(); ++k) {
    const Coefficients& c = h.snapshots[k];
    if (labels.size() != c.n) throw std::invalid_argument("check_coefficient_structure: label count mismatch");
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < c.m; ++r) {
        for (std::size_t i = 0; i < c.n; ++i) {
          const double z = c.zeta[c.ri(b, r, i)];
          const double o = c.omega[c.ri(b, r, i)];
          const double sv = std::max(-z, o);
          if (sv > sign.observed) {
            sign.observed = sv;
            sign.witness = witness(h.t[k], {{"j", jl(b)}, {"r", ll(r)}, {"i", ll(i)}}, sv);
          }
          const double stray = labels[i] == bank_sign(b) ? std::abs(o) : std::abs(z);
          if (stray > zeros.observed) {
            zeros.observed = stray;
            zeros.witness = witness(h.t[k], {{"j", jl(b)}, {"r", ll(r)}, {"i", ll(i)}}, stray);
          }
        }
      }
    }
  }
  if (sign.observed > 0.0) sign.status = CheckStatus::Fail;
  if (zeros.observed > 0.0) zeros.status = CheckStatus::Fail;
  return {{sign, zeros}};
}

InvariantReport check_ratio_band(const CoefficientHistory& h, double mu_norm, double sigma_p, std::size_t d,
                                 double band_factor, std::size_t t_check) {
  const double reference = mu_norm * mu_norm / (sigma_p * sigma_p * static_cast<double>(d));
  CheckResult res{"ratio_band", CheckStatus::Pass, band_factor, 1.0, std::nullopt, ""};
  double lo = INFINITY;
  double hi = -INFINITY;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < h.snapshots.size(); ++k) {
    if (h.t[k] == 0 || h.t[k] < t_check) continue;
    const Coefficients& c = h.snapshots[k];
    for (const auto& s : coefficient_summaries(c)) {
      ++checked;
      const std::size_t bank = bank_index(s.j);
      if (!s.ratio) {
        res.status = CheckStatus::Fail;
        res.observed = INFINITY;
        res.witness = witness(h.t[k], {{"j", jl(bank)}, {"r", ll(s.r)}}, INFINITY);
        continue;
      }
      const double normalized = *s.ratio / reference;
      lo = std::min(lo, normalized);
      hi = std::max(hi, normalized);
      const double factor = normalized > 0.0 ? std::max(normalized, 1.0 / normalized) : INFINITY;
      if (factor > res.observed) {
        res.observed = factor;
        res.witness = witness(h.t[k], {{"j", jl(bank)}, {"r", ll(s.r)}}, normalized);
      }
    }
  }
  if (checked == 0) {
    res.witness.reset();
    res.note = "no recorded iteration at or after the warm-up index; passes vacuously";
    return {{res}};
  }
  if (res.observed > band_factor) res.status = CheckStatus::Fail;
  if (res.status == CheckStatus::Pass) res.witness.reset();
  std::ostringstream note;
  note << "reference mu^2/(sigma_p^2 d) = " << reference << "; normalized ratio range [" << lo << ", " << hi
       << "] from t >= " << t_check;
  res.note = note.str();
  return {{res}};
}

std::optional<std::size_t> warmup_index(const std::vector<IterationRecord>& iterations, double threshold) {
  for (const auto& rec : iterations) {
    if (rec.loss < threshold) return rec.t;
  }
  return std::nullopt;
}

InvariantReport check_balanced_logits(const std::vector<IterationRecord>& iterations, const CoefficientHistory& h,
                                      const std::vector<int>& labels, double c4, double kappa) {
  CheckResult margin{"margin_difference", CheckStatus::Pass, c4, 0.0, std::nullopt, ""};
  CheckResult ratio{"logit_ratio", CheckStatus::Pass, std::exp(c4), 1.0, std::nullopt, ""};
  CheckResult balance{"zeta_balance", CheckStatus::Pass, kappa, 0.0, std::nullopt, ""};
  CheckResult consistency{"logit_ratio_consistency", CheckStatus::Pass, 0.0, 0.0, std::nullopt,
                          "for y_i f <= y_k f: exp(c)/4 <= l'_i/l'_k <= exp(c), c = y_k f - y_i f; "
                          "hard when y_i f >= -1, warn otherwise; observed is the worst log-violation"};
  constexpr double kRelTol = 1e-9;

  for (const auto& rec : iterations) {
    const std::size_t n = rec.margins.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const double zi = rec.margins[i];
        const double zk = rec.margins[k];
        const double diff = zi - zk;
        if (diff > margin.observed) {
          margin.observed = diff;
          margin.witness = witness(rec.t, {{"i", ll(i)}, {"k", ll(k)}}, diff);
        }
        const double li = rec.logit_derivs[i];
        const double lk = rec.logit_derivs[k];
        if (lk == 0.0) continue;
        const double r = li / lk;
        if (r > ratio.observed) {
          ratio.observed = r;
          ratio.witness = witness(rec.t, {{"i", ll(i)}, {"k", ll(k)}}, r);
        }
        if (zi > zk) continue;
        const double c = zk - zi;
        const double log_r = std::log(r);
        const double violation = std::max(log_r - c, (c - std::log(4.0)) - log_r);
        if (violation > kRelTol) {
          const bool hard = zi >= -1.0;
          if (violation > consistency.observed) {
            consistency.observed = violation;
            consistency.witness = witness(rec.t, {{"i", ll(i)}, {"k", ll(k)}}, r);
          }
          if (hard) {
            consistency.status = CheckStatus::Fail;
          } else if (consistency.status == CheckStatus::Pass) {
            consistency.status = CheckStatus::Warn;
          }
        }
      }
    }
  }
  if (margin.observed > c4) margin.status = CheckStatus::Fail;
  if (ratio.observed > std::exp(c4)) ratio.status = CheckStatus::Fail;

  for (std::size_t s = 0; s < h.snapshots.size(); ++s) {
    const Coefficients& c = h.snapshots[s];
    if (labels.size() != c.n) throw std::invalid_argument("check_balanced_logits: label count mismatch");
    std::vector<double> sums(c.n, 0.0);
    for (std::size_t i = 0; i < c.n; ++i) {
      const std::size_t b = bank_index(labels[i]);
      for (std::size_t r = 0; r < c.m; ++r) sums[i] += c.zeta[c.ri(b, r, i)];
    }
    const auto [mn, mx] = std::minmax_element(sums.begin(), sums.end());
    const double gap = *mx - *mn;
    if (gap > balance.observed) {
      balance.observed = gap;
      balance.witness = witness(h.t[s], {{"i", ll(static_cast<std::size_t>(mx - sums.begin()))},
                                         {"k", ll(static_cast<std::size_t>(mn - sums.begin()))}},
                                gap);
    }
  }
  if (balance.observed > kappa) balance.status = CheckStatus::Fail;

  for (CheckResult* c : {&margin, &ratio, &balance}) {
    if (c->status == CheckStatus::Pass) c->witness.reset();
  }
  if (consistency.status == CheckStatus::Pass) consistency.witness.reset();
  return {{margin, ratio, balance, consistency}};
}

InvariantReport check_margin_spread(const std::vector<IterationRecord>& iterations, double bound) {
  CheckResult res{"margin_spread", CheckStatus::Pass, bound, 0.0, std::nullopt, ""};
  for (const auto& rec : iterations) {
    const double spread = rec.max_margin - rec.min_margin;
    if (spread > res.observed) {
      res.observed = spread;
      res.witness = witness(rec.t, {}, spread);
    }
  }
  if (res.observed > bound) {
    res.status = CheckStatus::Fail;
  } else {
    res.witness.reset();
  }
  return {{res}};
}

InvariantReport check_activation_persistence(const ActivationHistory& h) {
  CheckResult si{"persistence_neuron_sets", CheckStatus::Pass, 0.0, 0.0, std::nullopt,
                 "S_i^(0) subset of S_i^(t); observed counts lost (t, i, r) memberships"};
  CheckResult sjr{"persistence_sample_sets", CheckStatus::Pass, 0.0, 0.0, std::nullopt,
                  "S_jr^(0) subset of S_jr^(t); observed counts lost (t, j, r, i) memberships"};
  CheckResult size_i{"initial_neuron_set_size", CheckStatus::Pass, 0.4 * static_cast<double>(h.m), INFINITY,
                     std::nullopt, "min_i |S_i^(0)| against 0.4 m"};
  CheckResult size_jr{"initial_sample_set_size", CheckStatus::Pass, static_cast<double>(h.n) / 8.0, INFINITY,
                      std::nullopt, "min_{j,r} |S_jr^(0)| against n/8"};
  if (h.t.empty()) {
    size_i.observed = size_jr.observed = 0.0;
    size_i.note = size_jr.note = "no activation records";
    return {{si, sjr, size_i, size_jr}};
  }

  for (std::size_t i = 0; i < h.n; ++i) {
    const double sz = static_cast<double>(h.neuron_set(0, i).size());
    if (sz < size_i.observed) {
      size_i.observed = sz;
      if (sz < size_i.bound) size_i.witness = witness(h.t[0], {{"i", ll(i)}}, sz);
    }
  }
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < h.m; ++r) {
      const double sz = static_cast<double>(h.sample_set(0, b, r).size());
      if (sz < size_jr.observed) {
        size_jr.observed = sz;
        if (sz < size_jr.bound) size_jr.witness = witness(h.t[0], {{"j", jl(b)}, {"r", ll(r)}}, sz);
      }
    }
  }
  if (size_i.witness) size_i.status = CheckStatus::Warn;
  if (size_jr.witness) size_jr.status = CheckStatus::Warn;

  for (std::size_t k = 1; k < h.t.size(); ++k) {
    for (std::size_t i = 0; i < h.n; ++i) {
      const std::size_t b = bank_index(h.labels[i]);
      for (std::size_t r = 0; r < h.m; ++r) {
        if (h.active(0, b, r, i) && !h.active(k, b, r, i)) {
          si.observed += 1.0;
          sjr.observed += 1.0;
          if (!si.witness) {
            si.witness = witness(h.t[k], {{"i", ll(i)}, {"r", ll(r)}}, 0.0);
            sjr.witness = witness(h.t[k], {{"j", jl(b)}, {"r", ll(r)}, {"i", ll(i)}}, 0.0);
          }
        }
      }
    }
  }
  if (si.witness) si.status = CheckStatus::Fail;
  if (sjr.witness) sjr.status = CheckStatus::Fail;
  return {{si, sjr, size_i, size_jr}};
}

InvariantReport check_dual_track(const std::vector<DualTrackPoint>& points, double condition) {
  CheckResult agree{"dual_track_agreement", CheckStatus::Pass, 1.0, 0.0, std::nullopt,
                    "observed is max |stepped - recovered| / max(1e-6 * magnitude, 1e-9); <= 1 agrees"};
  CheckResult resid{"reconstruction_residual", CheckStatus::Pass, 1e-8, 0.0, std::nullopt,
                    "relative residual ||B c - (w_t - w_0)|| / max(1, ||w_t - w_0||)"};
  for (const auto& p : points) {
    if (p.agreement.worst > agree.observed) {
      agree.observed = p.agreement.worst;
      agree.witness = witness(p.t, {}, p.agreement.max_abs_diff);
    }
    if (p.relative_residual > resid.observed) {
      resid.observed = p.relative_residual;
      resid.witness = witness(p.t, {}, p.relative_residual);
    }
  }
  if (agree.observed > 1.0) {
    agree.status = condition < Basis::kTightCondition ? CheckStatus::Fail : CheckStatus::Warn;
  } else {
    agree.witness.reset();
  }
  if (condition >= Basis::kTightCondition) agree.note += "; Gram condition above 1e8, tolerance not enforced";
  if (resid.observed >= 1e-8) {
    resid.status = CheckStatus::Fail;
  } else {
    resid.witness.reset();
  }
  return {{agree, resid}};
}

// ---------------------------------------------------------------------------
// Condition report

ConditionReport condition_report(const DataConfig& data, const TrainConfig& train, std::size_t t_star,
                                 double delta) {
  ConditionReport rep;
  rep.delta = delta;
  rep.t_star = t_star;
  const double d = static_cast<double>(data.d);
  const double n = static_cast<double>(data.n);
  const double m = static_cast<double>(train.m);
  const double mu2 = data.mu_norm * data.mu_norm;
  const double sp = data.sigma_p;
  const double log_t = t_star > 1 ? std::log(static_cast<double>(t_star)) : 0.0;

  auto add = [&rep](std::string name, double lhs, double rhs, bool at_least) {
    ConditionClause c{std::move(name), lhs, rhs, at_least, 0.0, false};
    c.ratio = rhs != 0.0 ? lhs / rhs : (lhs == 0.0 ? 1.0 : INFINITY);
    c.holds = at_least ? lhs >= rhs : lhs <= rhs;
    rep.clauses.push_back(std::move(c));
  };
  add("dimension", d,
      std::max(n * mu2 / (sp * sp) * log_t, n * n * std::log(n * m / delta) * log_t * log_t), true);
  add("width", m, std::log(n / delta), true);
  add("sample_size", n, std::log(m / delta), true);
  add("signal_norm", mu2, sp * sp * std::log(n / delta), true);
  add("noise_rate", data.p, 1.0, false);
  add("init_scale", train.sigma_0,
      1.0 / std::max(sp * d / std::sqrt(n), std::sqrt(std::log(m / delta)) * data.mu_norm), false);
  add("learning_rate", train.eta,
      1.0 / std::max(sp * sp * std::pow(d, 1.5) / (n * n * m * std::sqrt(std::log(n / delta))), sp * sp * d / n),
      false);
  rep.phase_quantity = n * mu2 * mu2 / (sp * sp * sp * sp * d);
  return rep;
}

std::string ConditionReport::to_json() const {
  json arr = json::array();
  for (const auto& c : clauses) {
    arr.push_back({{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)},
                   {"relation", c.at_least ? ">=" : "<="}, {"ratio", number(c.ratio)}, {"holds", c.holds}});
  }
  json root{{"delta", delta}, {"t_star", t_star}, {"phase_quantity", number(phase_quantity)}, {"clauses", arr}};
  return root.dump(2) + "\n";
}

InvariantReport run_theory_checks(const RunHistories& h, const DataConfig& data, const MonitorSettings& s) {
  InvariantReport rep = check_monotonicity(h.coefficients, s.monotone_tol);
  rep.append(check_coefficient_structure(h.coefficients, h.labels));
  const auto warm = warmup_index(h.iterations, s.warmup_loss);
  if (warm) {
    rep.append(check_ratio_band(h.coefficients, data.mu_norm, data.sigma_p, data.d, s.band_factor, *warm));
  } else {
    rep.checks.push_back({"ratio_band", CheckStatus::Pass, s.band_factor, 1.0, std::nullopt,
                          "training loss never fell below the warm-up threshold; passes vacuously"});
  }
  rep.append(check_balanced_logits(h.iterations, h.coefficients, h.labels, s.c4, s.kappa));
  rep.append(check_margin_spread(h.iterations, s.figure_spread));
  rep.append(check_activation_persistence(h.activations));
  return rep;
}

}  // namespace benignlab
