#include "benignlab/relu_cnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "benignlab/csv.hpp"
#include "benignlab/rng.hpp"

namespace benignlab {

Weights::Weights(std::size_t m, std::size_t d) : m_(m), d_(d), data_(2 * m * d, 0.0) {}

bool Weights::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void TrainConfig::validate() const {
  if (m < 1) throw InvalidConfig("m: must be >= 1");
  if (!(eta > 0.0)) throw InvalidConfig("eta: must be > 0");
  if (!(sigma_0 >= 0.0)) throw InvalidConfig("sigma0: must be >= 0");
  if (!(epsilon > 0.0)) throw InvalidConfig("epsilon: must be > 0");
  if (record_every < 1) throw InvalidConfig("record_every: must be >= 1");
}

Weights init_weights(std::size_t m, std::size_t d, double sigma_0, std::uint64_t seed) {
  if (m < 1 || d < 1) throw InvalidConfig("init_weights: m and d must be >= 1");
  if (!(sigma_0 >= 0.0)) throw InvalidConfig("sigma0: must be >= 0");
  Weights w(m, d);
  Rng rng(seed);
  for (double& v : w.flat()) v = rng.normal(0.0, sigma_0);
  return w;
}

namespace {

void check_dims(const Weights& w, std::size_t d) {
  if (w.d() != d) {
    throw std::invalid_argument("dimension mismatch: weights have d=" + std::to_string(w.d()) +
                                ", input has d=" + std::to_string(d));
  }
}

double relu(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace

ForwardResult forward(const Weights& w, std::span<const double> patch1, std::span<const double> patch2) {
  check_dims(w, patch1.size());
  check_dims(w, patch2.size());
  const std::size_t m = w.m();
  ForwardResult out;
  out.active.resize(2 * m * 2);
  double bank_sum[2] = {0.0, 0.0};
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < m; ++r) {
      const double z1 = dot(w.filter(b, r), patch1);
      const double z2 = dot(w.filter(b, r), patch2);
      bank_sum[b] += relu(z1) + relu(z2);
      out.active[(b * m + r) * 2 + 0] = z1 >= 0.0;
      out.active[(b * m + r) * 2 + 1] = z2 >= 0.0;
    }
  }
  out.F_plus = bank_sum[0] / static_cast<double>(m);
  out.F_minus = bank_sum[1] / static_cast<double>(m);
  out.f = out.F_plus - out.F_minus;
  return out;
}

ForwardResult forward(const Weights& w, const DataPoint& x) { return forward(w, x.patch1, x.patch2); }

double logistic_loss(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double logistic_derivative(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

BatchPass evaluate_batch(const Weights& w, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("evaluate_batch: empty dataset");
  const std::size_t m = w.m();
  const std::size_t n = data.size();
  BatchPass pass;
  pass.m = m;
  pass.n = n;
  pass.preact.resize(2 * m * n * 2);
  pass.outputs.assign(n, 0.0);
  pass.margins.resize(n);
  pass.logit_derivs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_dims(w, data[i].patch1.size());
    check_dims(w, data[i].patch2.size());
  }
  for (std::size_t i = 0; i < n; ++i) {
    double bank_sum[2] = {0.0, 0.0};
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t r = 0; r < m; ++r) {
        const double z1 = dot(w.filter(b, r), data[i].patch1);
        const double z2 = dot(w.filter(b, r), data[i].patch2);
        pass.preact[((b * m + r) * n + i) * 2 + 0] = z1;
        pass.preact[((b * m + r) * n + i) * 2 + 1] = z2;
        bank_sum[b] += relu(z1) + relu(z2);
      }
    }
    pass.outputs[i] = bank_sum[0] / static_cast<double>(m) - bank_sum[1] / static_cast<double>(m);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = data[i].y * pass.outputs[i];
    pass.margins[i] = z;
    pass.logit_derivs[i] = logistic_derivative(z);
    total += logistic_loss(z);
  }
  pass.loss = total / static_cast<double>(n);
  return pass;
}

double training_loss(const Weights& w, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("training_loss: empty dataset");
  return evaluate_batch(w, data).loss;
}

Weights gradient_from(const BatchPass& pass, const Weights& w, const Dataset& data) {
  const std::size_t m = w.m();
  const std::size_t d = w.d();
  const std::size_t n = data.size();
  if (pass.m != m || pass.n != n) throw std::invalid_argument("gradient: pass does not match weights/dataset");
  Weights g(m, d);
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
  for (std::size_t b = 0; b < 2; ++b) {
    const double j = bank_sign(b);
    for (std::size_t r = 0; r < m; ++r) {
      auto out = g.filter(b, r);
      for (std::size_t i = 0; i < n; ++i) {
        const double coeff = scale * pass.logit_derivs[i] * j * data[i].y;
        if (pass.active(b, r, i, 1)) {
          for (std::size_t k = 0; k < d; ++k) out[k] += coeff * data[i].patch1[k];
        }
        if (pass.active(b, r, i, 2)) {
          for (std::size_t k = 0; k < d; ++k) out[k] += coeff * data[i].patch2[k];
        }
      }
    }
  }
  return g;
}

Weights gradient(const Weights& w, const Dataset& data) {
  return gradient_from(evaluate_batch(w, data), w, data);
}

Weights gd_step_from(const BatchPass& pass, const Weights& w, const Dataset& data, double eta) {
  Weights next = w;
  const Weights g = gradient_from(pass, w, data);
  auto dst = next.flat();
  auto src = g.flat();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= eta * src[k];
  return next;
}

Weights gd_step(const Weights& w, const Dataset& data, double eta) {
  return gd_step_from(evaluate_batch(w, data), w, data, eta);
}

void write_weights_csv(const std::filesystem::path& path, const Weights& w) {
  CsvTable t;
  t.header = {"bank", "r", "coord", "value"};
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t r = 0; r < w.m(); ++r) {
      auto f = w.filter(b, r);
      for (std::size_t k = 0; k < w.d(); ++k) {
        t.rows.push_back({bank_sign(b) > 0 ? "+1" : "-1", std::to_string(r), std::to_string(k), format_real(f[k])});
      }
    }
  }
  write_csv(path, t);
}

Weights read_weights_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  std::size_t m = 0;
  std::size_t d = 0;
  for (std::size_t row = 0; row < t.rows.size(); ++row) {
    m = std::max<std::size_t>(m, static_cast<std::size_t>(t.integer(row, "r")) + 1);
    d = std::max<std::size_t>(d, static_cast<std::size_t>(t.integer(row, "coord")) + 1);
  }
  if (t.rows.size() != 2 * m * d) throw CsvError("weights checkpoint is not a full 2 x m x d table");
  Weights w(m, d);
  for (std::size_t row = 0; row < t.rows.size(); ++row) {
    const long long bank = t.integer(row, "bank");
    if (bank != 1 && bank != -1) throw CsvError("weights checkpoint: bank must be +1 or -1");
    w.filter(bank_index(static_cast<int>(bank)), static_cast<std::size_t>(t.integer(row, "r")))
        [static_cast<std::size_t>(t.integer(row, "coord"))] = t.real(row, "value");
  }
  return w;
}

}  // namespace benignlab
