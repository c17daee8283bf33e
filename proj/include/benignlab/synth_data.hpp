#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "benignlab/rng.hpp"

namespace benignlab {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DataConfig {
  std::size_t d = 100;
  std::size_t n = 20;
  double mu_norm = 5.0;
  double sigma_p = 1.0;
  double p = 0.1;  // label-flip probability
  std::uint64_t seed = 1;

  // Throws InvalidConfig naming the offending field.
  void validate() const;
};

// One sample: two patches, one of which is y_hat * mu and the other noise.
struct DataPoint {
  std::vector<double> patch1;
  std::vector<double> patch2;
  int y = 1;            // observed label
  int y_hat = 1;        // true label
  int signal_slot = 1;  // 1 or 2

  std::span<const double> patch(int slot) const { return slot == 1 ? patch1 : patch2; }
  std::span<const double> signal() const { return patch(signal_slot); }
  // The noise vector is the non-signal patch.
  std::span<const double> xi() const { return patch(3 - signal_slot); }
  bool flipped() const { return y != y_hat; }
};

using Dataset = std::vector<DataPoint>;

// mu = mu_norm * e_1.
std::vector<double> make_signal(std::size_t d, double mu_norm);

// Sequential i.i.d. draws. Draw order per point: y_hat (sign), flip coin (uniform < p), slot coin
// (sign; +1 puts the signal in patch 1), then d noise coordinates.
class PointSampler {
 public:
  PointSampler(const DataConfig& config, std::vector<double> mu, std::uint64_t seed);
  DataPoint next();

 private:
  DataConfig config_;
  std::vector<double> mu_;
  Rng rng_;
};

// `mu` must have length config.d; the overload without it uses make_signal.
Dataset generate_dataset(const DataConfig& config, std::span<const double> mu);
Dataset generate_dataset(const DataConfig& config);

// Fresh draws from the same distribution using `seed` instead of config.seed.
Dataset sample_test_points(const DataConfig& config, std::size_t count, std::uint64_t seed);

struct SetStats {
  std::size_t n = 0;
  std::size_t clean = 0;     // |S+|: y == y_hat
  std::size_t flipped = 0;   // |S-|
  std::size_t positive = 0;  // |S_1|: y == +1
  std::size_t negative = 0;  // |S_-1|
  std::size_t clean_positive = 0;
  std::size_t clean_negative = 0;
  std::size_t flipped_positive = 0;
  std::size_t flipped_negative = 0;
  double min_noise_sq = 0.0;  // min_i ||xi_i||^2
  double max_noise_sq = 0.0;
  double max_noise_cross = 0.0;   // max_{i != k} |<xi_i, xi_k>|
  double max_noise_signal = 0.0;  // max_i |<xi_i, mu>|
  // Points with ||xi_i||^2 outside [sigma_p^2 d / 2, 3 sigma_p^2 d / 2].
  std::size_t noise_norm_violations = 0;
};

// `mu` is the signal used to build the dataset; sigma_p sets the norm band.
SetStats dataset_stats(const Dataset& data, std::span<const double> mu, double sigma_p);

// CSV: index,y,y_hat,signal_slot,patch1_0..patch1_{d-1},patch2_0..patch2_{d-1}
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace benignlab
