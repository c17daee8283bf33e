#include "benignlab/decomposition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "benignlab/csv.hpp"

namespace benignlab {

struct Basis::Factor {
  Eigen::MatrixXd scaled;  // d x (n+1), columns are the scaled basis vectors
  Eigen::LLT<Eigen::MatrixXd> llt;
};

Basis::~Basis() = default;
Basis::Basis(Basis&&) noexcept = default;
Basis& Basis::operator=(Basis&&) noexcept = default;

Basis::Basis(std::span<const double> mu, const Dataset& data)
    : mu_(mu.begin(), mu.end()), factor_(std::make_unique<Factor>()) {
  const std::size_t d = mu_.size();
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("Basis: empty dataset");
  mu_sq_ = dot(mu_, mu_);
  xis_.resize(n * d);
  noise_sq_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = data[i].xi();
    if (xi.size() != d) throw std::invalid_argument("Basis: noise dimension differs from mu");
    std::copy(xi.begin(), xi.end(), xis_.begin() + static_cast<std::ptrdiff_t>(i * d));
    noise_sq_[i] = dot(xi, xi);
  }

  if (!(mu_sq_ > 0.0) || std::any_of(noise_sq_.begin(), noise_sq_.end(), [](double s) { return !(s > 0.0); })) {
    condition_ = INFINITY;
    throw IllConditionedBasis(condition_, "basis contains a zero vector; Gram matrix is singular");
  }

  Eigen::MatrixXd& B = factor_->scaled;
  B.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n + 1));
  for (std::size_t k = 0; k < d; ++k) {
    B(static_cast<Eigen::Index>(k), 0) = mu_[k] / mu_sq_;
    for (std::size_t i = 0; i < n; ++i) {
      B(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i + 1)) = xis_[i * d + k] / noise_sq_[i];
    }
  }
  const Eigen::MatrixXd gram = B.transpose() * B;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : INFINITY;
  if (!(condition_ <= kMaxCondition)) {
    throw IllConditionedBasis(condition_, "Gram matrix condition number " + format_real(condition_) +
                                              " exceeds " + format_real(kMaxCondition));
  }
  factor_->llt.compute(gram);
  if (factor_->llt.info() != Eigen::Success) {
    throw IllConditionedBasis(condition_, "Cholesky factorization of the Gram matrix failed");
  }
}

std::vector<double> Basis::solve(std::span<const double> v, double* residual) const {
  const Eigen::Map<const Eigen::VectorXd> vec(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd rhs = factor_->scaled.transpose() * vec;
  const Eigen::VectorXd c = factor_->llt.solve(rhs);
  if (residual) *residual = (factor_->scaled * c - vec).norm();
  return {c.data(), c.data() + c.size()};
}

RecoveredCoefficients recover_coefficients(const Weights& w_t, const Weights& w_0, const Basis& basis) {
  if (w_t.m() != w_0.m() || w_t.d() != w_0.d() || w_t.d() != basis.d()) {
    throw std::invalid_argument("recover_coefficients: shape mismatch");
  }
  const std::size_t m = w_t.m();
  const std::size_t n = basis.n();
  RecoveredCoefficients out;
  out.coeffs = Coefficients(m, n);
  std::vector<double> delta(w_t.d());
  for (std::size_t b = 0; b < 2; ++b) {
    const double j = bank_sign(b);
    for (std::size_t r = 0; r < m; ++r) {
      auto cur = w_t.filter(b, r);
      auto init = w_0.filter(b, r);
      for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = cur[k] - init[k];
      double residual = 0.0;
      const auto c = basis.solve(delta, &residual);
      out.coeffs.gamma[out.coeffs.gi(b, r)] = j * c[0];
      for (std::size_t i = 0; i < n; ++i) {
        const double rho = c[i + 1];
        out.coeffs.zeta[out.coeffs.ri(b, r, i)] = rho >= 0.0 ? rho : 0.0;
        out.coeffs.omega[out.coeffs.ri(b, r, i)] = rho <= 0.0 ? rho : 0.0;
      }
      const double norm = std::sqrt(dot(delta, delta));
      out.max_residual = std::max(out.max_residual, residual);
      out.max_relative_residual = std::max(out.max_relative_residual, residual / std::max(1.0, norm));
    }
  }
  return out;
}

Coefficients step_coefficients(const Coefficients& c, const BatchPass& pass, const Basis& basis,
                               const Dataset& data, double eta, GammaStep* step) {
  const std::size_t m = c.m;
  const std::size_t n = c.n;
  if (pass.m != m || pass.n != n || data.size() != n || basis.n() != n) {
    throw std::invalid_argument("step_coefficients: shape mismatch");
  }
  Coefficients next = c;
  const double scale = eta / (static_cast<double>(n) * static_cast<double>(m));
  if (step) {
    step->aggregate.assign(2 * m, 0.0);
    step->delta.assign(2 * m, 0.0);
  }
  for (std::size_t b = 0; b < 2; ++b) {
    const int j = bank_sign(b);
    for (std::size_t r = 0; r < m; ++r) {
      double clean_sum = 0.0;
      double flipped_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const DataPoint& pt = data[i];
        const double lp = pass.logit_derivs[i];
        if (pass.active(b, r, i, pt.signal_slot)) {
          (pt.flipped() ? flipped_sum : clean_sum) += lp;
        }
        const int noise_slot = 3 - pt.signal_slot;
        if (!pass.active(b, r, i, noise_slot)) continue;
        const double inc = scale * lp * basis.noise_sq(i);
        if (pt.y == j) {
          next.zeta[c.ri(b, r, i)] -= inc;
        } else {
          next.omega[c.ri(b, r, i)] += inc;
        }
      }
      const double aggregate = clean_sum - flipped_sum;
      const double delta = -scale * aggregate * basis.mu_sq();
      next.gamma[c.gi(b, r)] += delta;
      if (step) {
        step->aggregate[c.gi(b, r)] = aggregate;
        step->delta[c.gi(b, r)] = delta;
      }
    }
  }
  return next;
}

std::vector<CoefficientSummary> coefficient_summaries(const Coefficients& c) {
  std::vector<CoefficientSummary> out;
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < c.m; ++r) {
      CoefficientSummary s;
      s.j = bank_sign(b);
      s.r = r;
      s.gamma = c.gamma[c.gi(b, r)];
      for (std::size_t i = 0; i < c.n; ++i) {
        const double z = c.zeta[c.ri(b, r, i)];
        const double o = c.omega[c.ri(b, r, i)];
        s.sum_zeta += z;
        s.max_zeta = std::max(s.max_zeta, z);
        s.min_omega = std::min(s.min_omega, o);
      }
      if (s.sum_zeta != 0.0) s.ratio = s.gamma / s.sum_zeta;
      out.push_back(s);
    }
  }
  return out;
}

Agreement compare_coefficients(const Coefficients& a, const Coefficients& b, double rel, double abs_floor) {
  if (a.m != b.m || a.n != b.n) throw std::invalid_argument("compare_coefficients: shape mismatch");
  Agreement out;
  auto visit = [&](double x, double y) {
    const double diff = std::abs(x - y);
    const double tol = std::max(rel * std::max(std::abs(x), std::abs(y)), abs_floor);
    out.max_abs_diff = std::max(out.max_abs_diff, diff);
    out.worst = std::max(out.worst, diff / tol);
  };
  for (std::size_t k = 0; k < a.gamma.size(); ++k) visit(a.gamma[k], b.gamma[k]);
  for (std::size_t k = 0; k < a.zeta.size(); ++k) {
    visit(a.zeta[k] + a.omega[k], b.zeta[k] + b.omega[k]);
  }
  return out;
}

CoefficientTracker::CoefficientTracker(const Dataset& data, std::span<const double> mu, double eta, bool verify)
    : data_(data), basis_(mu, data), eta_(eta), verify_(verify) {}

void CoefficientTracker::on_start(const Weights& w0, const BatchPass& /*pass0*/) {
  w0_ = w0;
  current_ = Coefficients(w0.m(), data_.size());
  history_ = {};
  dual_.clear();
}

void CoefficientTracker::on_record(std::size_t t, const Weights& w, const BatchPass& /*pass*/) {
  history_.t.push_back(t);
  history_.snapshots.push_back(current_);
  if (!verify_) return;
  const RecoveredCoefficients rec = recover_coefficients(w, w0_, basis_);
  dual_.push_back({t, compare_coefficients(current_, rec.coeffs), rec.max_relative_residual});
}

void CoefficientTracker::on_step(const StepView& step) {
  GammaStep g;
  g.t = step.t;
  current_ = step_coefficients(current_, step.pass, basis_, data_, eta_, &g);
  history_.steps.push_back(std::move(g));
}

namespace {

std::string sign_str(std::size_t bank) { return bank_sign(bank) > 0 ? "+1" : "-1"; }

}  // namespace

void write_coeffs_csv(const std::filesystem::path& path, const CoefficientHistory& h) {
  CsvTable t;
  t.header = {"t", "j", "r", "gamma", "sum_zeta", "min_omega", "max_zeta", "ratio"};
  for (std::size_t k = 0; k < h.t.size(); ++k) {
    for (const auto& s : coefficient_summaries(h.snapshots[k])) {
      t.rows.push_back({std::to_string(h.t[k]), s.j > 0 ? "+1" : "-1", std::to_string(s.r), format_real(s.gamma),
                        format_real(s.sum_zeta), format_real(s.min_omega), format_real(s.max_zeta),
                        s.ratio ? format_real(*s.ratio) : std::string()});
    }
  }
  write_csv(path, t);
}

void write_rho_csv(const std::filesystem::path& path, const CoefficientHistory& h) {
  CsvTable t;
  t.header = {"t", "j", "r", "i", "zeta", "omega"};
  for (std::size_t k = 0; k < h.t.size(); ++k) {
    const Coefficients& c = h.snapshots[k];
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < c.m; ++r) {
        for (std::size_t i = 0; i < c.n; ++i) {
          t.rows.push_back({std::to_string(h.t[k]), sign_str(b), std::to_string(r), std::to_string(i),
                            format_real(c.zeta[c.ri(b, r, i)]), format_real(c.omega[c.ri(b, r, i)])});
        }
      }
    }
  }
  write_csv(path, t);
}

void write_gamma_steps_csv(const std::filesystem::path& path, const CoefficientHistory& h) {
  CsvTable t;
  t.header = {"t", "j", "r", "aggregate", "delta"};
  for (const auto& s : h.steps) {
    const std::size_t m = s.aggregate.size() / 2;
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < m; ++r) {
        t.rows.push_back({std::to_string(s.t), sign_str(b), std::to_string(r), format_real(s.aggregate[b * m + r]),
                          format_real(s.delta[b * m + r])});
      }
    }
  }
  write_csv(path, t);
}

CoefficientHistory read_coefficient_history(const std::filesystem::path& coeffs_csv,
                                            const std::filesystem::path& rho_csv,
                                            const std::filesystem::path& gamma_steps_csv) {
  const CsvTable gam = read_csv(coeffs_csv);
  const CsvTable rho = read_csv(rho_csv);
  const CsvTable steps = read_csv(gamma_steps_csv);

  auto bank_of = [](long long j) {
    if (j != 1 && j != -1) throw CsvError("coefficient table: j must be +1 or -1");
    return bank_index(static_cast<int>(j));
  };

  std::size_t m = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < rho.rows.size(); ++r) {
    m = std::max<std::size_t>(m, static_cast<std::size_t>(rho.integer(r, "r")) + 1);
    n = std::max<std::size_t>(n, static_cast<std::size_t>(rho.integer(r, "i")) + 1);
  }
  for (std::size_t r = 0; r < gam.rows.size(); ++r) {
    m = std::max<std::size_t>(m, static_cast<std::size_t>(gam.integer(r, "r")) + 1);
  }

  CoefficientHistory h;
  std::map<long long, std::size_t> index;
  auto snapshot = [&](long long t) -> Coefficients& {
    auto [it, inserted] = index.try_emplace(t, h.t.size());
    if (inserted) {
      h.t.push_back(static_cast<std::size_t>(t));
      h.snapshots.emplace_back(m, n);
    }
    return h.snapshots[it->second];
  };
  for (std::size_t r = 0; r < gam.rows.size(); ++r) {
    Coefficients& c = snapshot(gam.integer(r, "t"));
    c.gamma[c.gi(bank_of(gam.integer(r, "j")), static_cast<std::size_t>(gam.integer(r, "r")))] =
        gam.real(r, "gamma");
  }
  for (std::size_t r = 0; r < rho.rows.size(); ++r) {
    Coefficients& c = snapshot(rho.integer(r, "t"));
    const std::size_t k =
        c.ri(bank_of(rho.integer(r, "j")), static_cast<std::size_t>(rho.integer(r, "r")),
             static_cast<std::size_t>(rho.integer(r, "i")));
    c.zeta[k] = rho.real(r, "zeta");
    c.omega[k] = rho.real(r, "omega");
  }

  std::map<long long, std::size_t> step_index;
  for (std::size_t r = 0; r < steps.rows.size(); ++r) {
    const long long t = steps.integer(r, "t");
    auto [it, inserted] = step_index.try_emplace(t, h.steps.size());
    if (inserted) {
      GammaStep g;
      g.t = static_cast<std::size_t>(t);
      g.aggregate.assign(2 * m, 0.0);
      g.delta.assign(2 * m, 0.0);
      h.steps.push_back(std::move(g));
    }
    GammaStep& g = h.steps[it->second];
    const std::size_t k = bank_of(steps.integer(r, "j")) * m + static_cast<std::size_t>(steps.integer(r, "r"));
    g.aggregate.at(k) = steps.real(r, "aggregate");
    g.delta.at(k) = steps.real(r, "delta");
  }
  return h;
}

}  // namespace benignlab
