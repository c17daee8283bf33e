#include "benignlab/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "benignlab/csv.hpp"
#include "benignlab/rng.hpp"

namespace benignlab {

void DataConfig::validate() const {
  if (d < 1) throw InvalidConfig("d: must be >= 1");
  if (n < 1) throw InvalidConfig("n: must be >= 1");
  if (!(mu_norm >= 0.0) || !std::isfinite(mu_norm)) throw InvalidConfig("mu: must be finite and >= 0");
  if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) throw InvalidConfig("sigma_p: must be finite and > 0");
  if (!(p >= 0.0 && p < 0.5)) throw InvalidConfig("p: must lie in [0, 0.5)");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<double> make_signal(std::size_t d, double mu_norm) {
  if (d == 0) throw InvalidConfig("d: signal dimension must be >= 1");
  std::vector<double> mu(d, 0.0);
  mu[0] = mu_norm;
  return mu;
}

PointSampler::PointSampler(const DataConfig& config, std::vector<double> mu, std::uint64_t seed)
    : config_(config), mu_(std::move(mu)), rng_(seed) {}

DataPoint PointSampler::next() {
  DataPoint pt;
  pt.y_hat = rng_.sign();
  pt.y = rng_.uniform() < config_.p ? -pt.y_hat : pt.y_hat;
  pt.signal_slot = rng_.sign() > 0 ? 1 : 2;
  std::vector<double> noise(config_.d);
  for (double& v : noise) v = rng_.normal(0.0, config_.sigma_p);
  std::vector<double> sig(config_.d);
  for (std::size_t k = 0; k < config_.d; ++k) sig[k] = pt.y_hat * mu_[k];
  if (pt.signal_slot == 1) {
    pt.patch1 = std::move(sig);
    pt.patch2 = std::move(noise);
  } else {
    pt.patch1 = std::move(noise);
    pt.patch2 = std::move(sig);
  }
  return pt;
}

namespace {

Dataset draw(const DataConfig& c, std::span<const double> mu, std::size_t count, std::uint64_t seed) {
  PointSampler sampler(c, {mu.begin(), mu.end()}, seed);
  Dataset out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace

Dataset generate_dataset(const DataConfig& config, std::span<const double> mu) {
  config.validate();
  if (mu.size() != config.d) throw InvalidConfig("mu: length must equal d");
  return draw(config, mu, config.n, config.seed);
}

Dataset generate_dataset(const DataConfig& config) {
  config.validate();
  const auto mu = make_signal(config.d, config.mu_norm);
  return draw(config, mu, config.n, config.seed);
}

Dataset sample_test_points(const DataConfig& config, std::size_t count, std::uint64_t seed) {
  config.validate();
  if (count == 0) throw InvalidConfig("test_count: must be >= 1");
  const auto mu = make_signal(config.d, config.mu_norm);
  return draw(config, mu, count, seed);
}

SetStats dataset_stats(const Dataset& data, std::span<const double> mu, double sigma_p) {
  if (data.empty()) throw std::invalid_argument("dataset_stats: empty dataset");
  SetStats s;
  s.n = data.size();
  const double d = static_cast<double>(mu.size());
  const double lo = sigma_p * sigma_p * d / 2.0;
  const double hi = 3.0 * sigma_p * sigma_p * d / 2.0;
  s.min_noise_sq = INFINITY;
  s.max_noise_sq = -INFINITY;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const DataPoint& pt = data[i];
    const bool clean = !pt.flipped();
    (clean ? s.clean : s.flipped)++;
    (pt.y > 0 ? s.positive : s.negative)++;
    if (clean) {
      (pt.y > 0 ? s.clean_positive : s.clean_negative)++;
    } else {
      (pt.y > 0 ? s.flipped_positive : s.flipped_negative)++;
    }
    const double sq = dot(pt.xi(), pt.xi());
    s.min_noise_sq = std::min(s.min_noise_sq, sq);
    s.max_noise_sq = std::max(s.max_noise_sq, sq);
    if (sq < lo || sq > hi) ++s.noise_norm_violations;
    s.max_noise_signal = std::max(s.max_noise_signal, std::abs(dot(pt.xi(), mu)));
    for (std::size_t k = i + 1; k < data.size(); ++k) {
      s.max_noise_cross = std::max(s.max_noise_cross, std::abs(dot(pt.xi(), data[k].xi())));
    }
  }
  return s;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  CsvTable t;
  const std::size_t d = data.empty() ? 0 : data.front().patch1.size();
  t.header = {"index", "y", "y_hat", "signal_slot"};
  for (int patch = 1; patch <= 2; ++patch) {
    for (std::size_t k = 0; k < d; ++k) {
      t.header.push_back("patch" + std::to_string(patch) + "_" + std::to_string(k));
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const DataPoint& pt = data[i];
    std::vector<std::string> row{std::to_string(i), std::to_string(pt.y), std::to_string(pt.y_hat),
                                 std::to_string(pt.signal_slot)};
    for (double v : pt.patch1) row.push_back(format_real(v));
    for (double v : pt.patch2) row.push_back(format_real(v));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 4 || (t.header.size() - 4) % 2 != 0) {
    throw CsvError("malformed dataset header in " + path.string());
  }
  const std::size_t d = (t.header.size() - 4) / 2;
  Dataset data;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.header.size()) throw CsvError("short dataset row " + std::to_string(r));
    DataPoint pt;
    pt.y = static_cast<int>(t.integer(r, "y"));
    pt.y_hat = static_cast<int>(t.integer(r, "y_hat"));
    pt.signal_slot = static_cast<int>(t.integer(r, "signal_slot"));
    pt.patch1.resize(d);
    pt.patch2.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      pt.patch1[k] = std::stod(t.rows[r][4 + k]);
      pt.patch2[k] = std::stod(t.rows[r][4 + d + k]);
    }
    data.push_back(std::move(pt));
  }
  return data;
}

}  // namespace benignlab
