#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "benignlab/synth_data.hpp"

namespace benignlab {

// Filter banks are indexed 0 for j = +1 and 1 for j = -1.
constexpr int bank_sign(std::size_t bank) { return bank == 0 ? 1 : -1; }
constexpr std::size_t bank_index(int j) { return j > 0 ? 0 : 1; }

// First-layer filters of the two-layer CNN. The second layer is fixed at
// +1/m for bank +1 and -1/m for bank -1.
class Weights {
 public:
  Weights() = default;
  Weights(std::size_t m, std::size_t d);

  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }

  std::span<double> filter(std::size_t bank, std::size_t r) {
    return {data_.data() + (bank * m_ + r) * d_, d_};
  }
  std::span<const double> filter(std::size_t bank, std::size_t r) const {
    return {data_.data() + (bank * m_ + r) * d_, d_};
  }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool all_finite() const;
  bool operator==(const Weights&) const = default;

 private:
  std::size_t m_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;  // [bank][r][coord]
};

struct TrainConfig {
  std::size_t m = 10;
  double eta = 0.1;
  double sigma_0 = 0.01;
  std::size_t max_iters = 100;
  double epsilon = 1e-6;  // stop once training loss <= epsilon
  std::size_t record_every = 1;
  std::uint64_t init_seed = 2;

  void validate() const;
};

// Entries i.i.d. N(0, sigma_0^2), drawn bank-major, then filter, then coordinate.
Weights init_weights(std::size_t m, std::size_t d, double sigma_0, std::uint64_t seed);

struct ForwardResult {
  double f = 0.0;
  double F_plus = 0.0;
  double F_minus = 0.0;
  // active[(bank * m + r) * 2 + (patch - 1)]: pre-activation >= 0.
  std::vector<std::uint8_t> active;
};

ForwardResult forward(const Weights& w, std::span<const double> patch1, std::span<const double> patch2);
ForwardResult forward(const Weights& w, const DataPoint& x);

// Everything one GD iteration needs, computed once from (W, dataset).
// Trainer, gradient and coefficient recurrences all read from the same pass.
struct BatchPass {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> preact;         // [bank][r][i][patch-1]
  std::vector<double> outputs;        // f(W, x_i)
  std::vector<double> margins;        // y_i f(W, x_i)
  std::vector<double> logit_derivs;   // l'(y_i f(W, x_i)) in (-1, 0)
  double loss = 0.0;

  double pre(std::size_t bank, std::size_t r, std::size_t i, int patch) const {
    return preact[((bank * m + r) * n + i) * 2 + static_cast<std::size_t>(patch - 1)];
  }
  // sigma'(z) with sigma'(0) = 1.
  bool active(std::size_t bank, std::size_t r, std::size_t i, int patch) const {
    return pre(bank, r, i, patch) >= 0.0;
  }
  bool operator==(const BatchPass&) const = default;
};

BatchPass evaluate_batch(const Weights& w, const Dataset& data);

// softplus(-z) = log(1 + exp(-z)) without overflow.
double logistic_loss(double z);
// d/dz log(1 + exp(-z)) = -1 / (1 + exp(z)).
double logistic_derivative(double z);

double training_loss(const Weights& w, const Dataset& data);

// Full-batch gradient of the training loss with respect to every filter:
//   grad_{j,r} = (1/(n m)) sum_i l'_i j y_i [sigma'(<w,x1_i>) x1_i + sigma'(<w,x2_i>) x2_i]
// Samples are accumulated in ascending index order.
Weights gradient(const Weights& w, const Dataset& data);
Weights gradient_from(const BatchPass& pass, const Weights& w, const Dataset& data);

Weights gd_step(const Weights& w, const Dataset& data, double eta);
Weights gd_step_from(const BatchPass& pass, const Weights& w, const Dataset& data, double eta);

// CSV columns bank,r,coord,value with bank in {+1,-1}.
void write_weights_csv(const std::filesystem::path& path, const Weights& w);
Weights read_weights_csv(const std::filesystem::path& path);

}  // namespace benignlab
