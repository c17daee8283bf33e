#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "benignlab/decomposition.hpp"

using namespace benignlab;

namespace {

struct RunFixture {
  DataConfig dc;
  TrainConfig tc;
  std::vector<double> mu;
  Dataset data;
  Weights w0;

  RunFixture() {
    mu = make_signal(dc.d, dc.mu_norm);
    data = generate_dataset(dc, mu);
    w0 = init_weights(tc.m, dc.d, tc.sigma_0, tc.init_seed);
  }
};

// w0 displaced by j gamma mu/||mu||^2 + sum_i rho_i xi_i/||xi_i||^2.
Weights displace(const Weights& w0, const Coefficients& c, const Dataset& data, std::span<const double> mu) {
  Weights w = w0;
  const double mu_sq = dot(mu, mu);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < w.m(); ++r) {
      auto f = w.filter(b, r);
      for (std::size_t k = 0; k < w.d(); ++k) f[k] += bank_sign(b) * c.gamma[c.gi(b, r)] * mu[k] / mu_sq;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto xi = data[i].xi();
        const double s = c.rho(b, r, i) / dot(xi, xi);
        for (std::size_t k = 0; k < w.d(); ++k) f[k] += s * xi[k];
      }
    }
  }
  return w;
}

}  // namespace

TEST(Recover, ZeroDisplacement) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  const auto rec = recover_coefficients(s.w0, s.w0, basis);
  for (double g : rec.coeffs.gamma) EXPECT_EQ(g, 0.0);
  for (double z : rec.coeffs.zeta) EXPECT_EQ(z, 0.0);
  for (double o : rec.coeffs.omega) EXPECT_EQ(o, 0.0);
}

TEST(Recover, SingleSignalTerm) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  Coefficients c(s.tc.m, s.dc.n);
  for (auto& g : c.gamma) g = 3.0;
  const auto rec = recover_coefficients(displace(s.w0, c, s.data, s.mu), s.w0, basis);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < s.tc.m; ++r) EXPECT_NEAR(rec.coeffs.gamma[c.gi(b, r)], 3.0, 1e-10);
  }
  for (std::size_t k = 0; k < c.zeta.size(); ++k) EXPECT_NEAR(rec.coeffs.zeta[k] + rec.coeffs.omega[k], 0.0, 1e-10);
}

TEST(Recover, PlantedCoefficients) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  Coefficients c(s.tc.m, s.dc.n);
  Rng r(4);
  for (auto& g : c.gamma) g = r.normal();
  for (std::size_t k = 0; k < c.zeta.size(); ++k) {
    const double v = r.normal();
    (v >= 0 ? c.zeta[k] : c.omega[k]) = v;
  }
  const auto rec = recover_coefficients(displace(s.w0, c, s.data, s.mu), s.w0, basis);
  EXPECT_LE(compare_coefficients(rec.coeffs, c, 1e-9, 1e-12).worst, 1.0);
  EXPECT_LT(rec.max_relative_residual, 1e-12);
  EXPECT_LT(basis.condition(), Basis::kTightCondition);
}

TEST(Recover, OffSpanResidualIsReported) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  // e_2 projected off the span still has a large component left.
  std::vector<double> e2(s.dc.d, 0.0);
  e2[1] = 1.0;
  double residual = 0.0;
  basis.solve(e2, &residual);
  EXPECT_GT(residual, 0.5);
}

TEST(Basis, SingularBasisThrows) {
  RunFixture s;
  Dataset dup = s.data;
  dup[1] = dup[0];
  EXPECT_THROW(Basis(s.mu, dup), IllConditionedBasis);
  EXPECT_THROW(Basis(make_signal(s.dc.d, 0.0), s.data), IllConditionedBasis);
}

TEST(Step, ZeroLogitDerivativesLeaveCoefficients) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  BatchPass pass = evaluate_batch(s.w0, s.data);
  std::fill(pass.logit_derivs.begin(), pass.logit_derivs.end(), 0.0);
  Coefficients c(s.tc.m, s.dc.n);
  c.gamma[0] = 1.5;
  c.zeta[3] = 0.25;
  EXPECT_EQ(step_coefficients(c, pass, basis, s.data, 0.1), c);
}

TEST(Step, FirstStepFormula) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  const BatchPass pass = evaluate_batch(s.w0, s.data);
  const Coefficients c = step_coefficients(Coefficients(s.tc.m, s.dc.n), pass, basis, s.data, s.tc.eta);
  const double scale = s.tc.eta / (s.dc.n * s.tc.m);
  for (std::size_t b = 0; b < 2; ++b) {
    const int j = bank_sign(b);
    for (std::size_t r = 0; r < s.tc.m; ++r) {
      for (std::size_t i = 0; i < s.dc.n; ++i) {
        const auto& pt = s.data[i];
        const auto xi = pt.xi();
        const bool on = dot(s.w0.filter(b, r), xi) >= 0.0;
        const double lp = -1.0 / (1.0 + std::exp(pass.margins[i]));
        const double z = pt.y == j && on ? -scale * lp * dot(xi, xi) : 0.0;
        const double o = pt.y == -j && on ? scale * lp * dot(xi, xi) : 0.0;
        EXPECT_NEAR(c.zeta[c.ri(b, r, i)], z, 1e-15);
        EXPECT_NEAR(c.omega[c.ri(b, r, i)], o, 1e-15);
      }
    }
  }
}

TEST(Step, MatchesOneGradientStep) {
  RunFixture s;
  const Basis basis(s.mu, s.data);
  const BatchPass pass = evaluate_batch(s.w0, s.data);
  const Coefficients c = step_coefficients(Coefficients(s.tc.m, s.dc.n), pass, basis, s.data, s.tc.eta);
  const Weights w1 = gd_step(s.w0, s.data, s.tc.eta);
  const Weights rebuilt = displace(s.w0, c, s.data, s.mu);
  for (std::size_t k = 0; k < w1.flat().size(); ++k) EXPECT_NEAR(rebuilt.flat()[k], w1.flat()[k], 1e-15);
}

TEST(Tracker, DualTrackAndStructure) {
  RunFixture s;
  CoefficientTracker tracker(s.data, s.mu, s.tc.eta, true);
  TrainHooks hooks;
  hooks.observers = {&tracker};
  train(s.data, s.w0, s.dc, s.tc, hooks);
  ASSERT_EQ(tracker.dual_track().size(), 101u);
  for (const auto& p : tracker.dual_track()) {
    EXPECT_LE(p.agreement.worst, 1.0) << "t=" << p.t;
    EXPECT_LT(p.relative_residual, 1e-8);
  }
  const auto& h = tracker.history();
  for (const auto& c : h.snapshots) {
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < c.m; ++r) {
        for (std::size_t i = 0; i < c.n; ++i) {
          const bool own = s.data[i].y == bank_sign(b);
          if (own) EXPECT_EQ(c.omega[c.ri(b, r, i)], 0.0);
          else EXPECT_EQ(c.zeta[c.ri(b, r, i)], 0.0);
          EXPECT_GE(c.zeta[c.ri(b, r, i)], 0.0);
          EXPECT_LE(c.omega[c.ri(b, r, i)], 0.0);
        }
      }
    }
  }
}

TEST(Summaries, ZeroAndRestrictedSums) {
  const auto zero = coefficient_summaries(Coefficients(2, 3));
  ASSERT_EQ(zero.size(), 4u);
  for (const auto& s : zero) {
    EXPECT_EQ(s.sum_zeta, 0.0);
    EXPECT_FALSE(s.ratio.has_value());
  }
  Coefficients c(1, 3);
  c.gamma[0] = 2.0;
  c.zeta[c.ri(0, 0, 0)] = 1.0;
  c.zeta[c.ri(0, 0, 2)] = 3.0;
  c.omega[c.ri(0, 0, 1)] = -0.5;
  const auto s = coefficient_summaries(c);
  EXPECT_EQ(s[0].sum_zeta, 4.0);
  EXPECT_EQ(s[0].max_zeta, 3.0);
  EXPECT_EQ(s[0].min_omega, -0.5);
  EXPECT_EQ(*s[0].ratio, 0.5);
}

TEST(History, CsvRoundTrip) {
  RunFixture s;
  s.tc.max_iters = 12;
  s.tc.record_every = 5;
  CoefficientTracker tracker(s.data, s.mu, s.tc.eta, false);
  TrainHooks hooks;
  hooks.observers = {&tracker};
  train(s.data, s.w0, s.dc, s.tc, hooks);
  const auto dir = std::filesystem::temp_directory_path() / "benignlab_coeff_rt";
  std::filesystem::create_directories(dir);
  write_coeffs_csv(dir / "coeffs.csv", tracker.history());
  write_rho_csv(dir / "rho.csv", tracker.history());
  write_gamma_steps_csv(dir / "gamma_steps.csv", tracker.history());
  const auto back = read_coefficient_history(dir / "coeffs.csv", dir / "rho.csv", dir / "gamma_steps.csv");
  EXPECT_EQ(back.t, tracker.history().t);
  EXPECT_EQ(back.snapshots, tracker.history().snapshots);
  EXPECT_EQ(back.steps, tracker.history().steps);
  std::filesystem::remove_all(dir);
}
