#pragma once

#include <cstdint>

#include "benignlab/relu_cnn.hpp"
#include "benignlab/synth_data.hpp"

namespace benignlab {

struct ErrorEstimate {
  double estimate = 0.0;   // P(y != sign f), sign(0) = +1
  std::size_t count = 0;
  double std_err = 0.0;    // sqrt(estimate (1 - estimate) / count)
  double clean_error = 0.0;  // P(y_hat f <= 0)
  double bayes_gap = 0.0;  // estimate - p

  // Integer accounting from the same draws.
  std::size_t errors = 0;
  std::size_t clean_errors = 0;
  std::size_t flipped = 0;             // draws with y != y_hat
  std::size_t errors_on_clean = 0;     // y == y_hat and prediction wrong
  std::size_t errors_on_flipped = 0;   // y != y_hat and prediction wrong
};

// Error counts of `w` on fixed points; `p` only feeds bayes_gap.
ErrorEstimate estimate_error(const Weights& w, const Dataset& points, double p);

// Monte-Carlo test error on `count` fresh draws seeded by `seed`.
ErrorEstimate test_error(const Weights& w, const DataConfig& config, std::size_t count, std::uint64_t seed);

// |estimate - (p + (1 - 2p) clean_error)|
double error_decomposition_check(const ErrorEstimate& e, double p);

// n mu^4 / (sigma_p^4 d). Throws on nonpositive input.
double phase_quantity(double n, double mu_norm, double sigma_p, double d);

}  // namespace benignlab
