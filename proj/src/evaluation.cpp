#include "benignlab/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace benignlab {

namespace {

void tally(ErrorEstimate& e, const Weights& w, const DataPoint& pt) {
  const double f = forward(w, pt).f;
  const int predicted = f >= 0.0 ? 1 : -1;
  const bool wrong = predicted != pt.y;
  if (wrong) ++e.errors;
  if (pt.y_hat * f <= 0.0) ++e.clean_errors;
  if (pt.flipped()) {
    ++e.flipped;
    if (wrong) ++e.errors_on_flipped;
  } else if (wrong) {
    ++e.errors_on_clean;
  }
}

void finish(ErrorEstimate& e, double p) {
  const double count = static_cast<double>(e.count);
  e.estimate = static_cast<double>(e.errors) / count;
  e.std_err = std::sqrt(e.estimate * (1.0 - e.estimate) / count);
  e.clean_error = static_cast<double>(e.clean_errors) / count;
  e.bayes_gap = e.estimate - p;
}

}  // namespace

ErrorEstimate estimate_error(const Weights& w, const Dataset& points, double p) {
  if (points.empty()) throw std::invalid_argument("estimate_error: no points");
  ErrorEstimate e;
  e.count = points.size();
  for (const DataPoint& pt : points) tally(e, w, pt);
  finish(e, p);
  return e;
}

ErrorEstimate test_error(const Weights& w, const DataConfig& config, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("test_error: count must be >= 1");
  config.validate();
  PointSampler sampler(config, make_signal(config.d, config.mu_norm), seed);
  ErrorEstimate e;
  e.count = count;
  for (std::size_t k = 0; k < count; ++k) tally(e, w, sampler.next());
  finish(e, config.p);
  return e;
}

double error_decomposition_check(const ErrorEstimate& e, double p) {
  return std::abs(e.estimate - (p + (1.0 - 2.0 * p) * e.clean_error));
}

double phase_quantity(double n, double mu_norm, double sigma_p, double d) {
  if (!(n > 0.0) || !(mu_norm > 0.0) || !(sigma_p > 0.0) || !(d > 0.0)) {
    throw std::invalid_argument("phase_quantity: all inputs must be positive");
  }
  const double mu2 = mu_norm * mu_norm;
  const double s2 = sigma_p * sigma_p;
  return n * mu2 * mu2 / (s2 * s2 * d);
}

}  // namespace benignlab
