#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "benignlab/synth_data.hpp"

using namespace benignlab;

namespace {

DataConfig small(std::size_t n, double p, std::uint64_t seed = 5) {
  DataConfig c;
  c.n = n;
  c.d = 2;
  c.mu_norm = 1.0;
  c.p = p;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Signal, AxisAligned) {
  const auto mu = make_signal(3, 5.0);
  EXPECT_EQ(mu, (std::vector<double>{5.0, 0.0, 0.0}));
  EXPECT_EQ(make_signal(2, 0.0), (std::vector<double>{0.0, 0.0}));
  const auto big = make_signal(100, 5.0);
  EXPECT_EQ(std::sqrt(dot(big, big)), 5.0);
  EXPECT_THROW(make_signal(0, 1.0), InvalidConfig);
}

TEST(DataConfig, RejectsBadValues) {
  DataConfig c;
  c.p = 1.5;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = DataConfig{};
  c.sigma_p = -1.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = DataConfig{};
  c.n = 0;
  EXPECT_THROW(c.validate(), InvalidConfig);
}

TEST(Dataset, PatchStructure) {
  DataConfig c;
  const auto mu = make_signal(c.d, c.mu_norm);
  const Dataset data = generate_dataset(c, mu);
  ASSERT_EQ(data.size(), c.n);
  for (const auto& pt : data) {
    ASSERT_TRUE(pt.signal_slot == 1 || pt.signal_slot == 2);
    const auto s = pt.signal();
    for (std::size_t k = 0; k < c.d; ++k) EXPECT_EQ(s[k], pt.y_hat * mu[k]);
    EXPECT_EQ(pt.xi().size(), c.d);
    EXPECT_TRUE(pt.y == pt.y_hat || pt.y == -pt.y_hat);
  }
}

TEST(Dataset, Deterministic) {
  DataConfig c;
  const Dataset a = generate_dataset(c);
  const Dataset b = generate_dataset(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].patch1, b[i].patch1);
    EXPECT_EQ(a[i].patch2, b[i].patch2);
    EXPECT_EQ(a[i].y, b[i].y);
  }
  c.seed = 2;
  EXPECT_NE(generate_dataset(c)[0].patch1, a[0].patch1);
}

TEST(Dataset, NoFlipsAtZeroNoise) {
  const Dataset data = generate_dataset(small(500, 0.0));
  for (const auto& pt : data) EXPECT_EQ(pt.y, pt.y_hat);
  const auto mu = make_signal(2, 1.0);
  EXPECT_EQ(dataset_stats(data, mu, 1.0).flipped, 0u);
}

TEST(Dataset, FlipFractionLarge) {
  const Dataset data = generate_dataset(small(100000, 0.1));
  std::size_t flips = 0;
  for (const auto& pt : data) flips += pt.flipped();
  EXPECT_NEAR(static_cast<double>(flips) / 1e5, 0.1, 0.003);
}

TEST(Dataset, MeanFlippedCountOverReplications) {
  DataConfig c;
  c.d = 10;
  double total = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    c.seed = 1000 + s;
    const auto data = generate_dataset(c);
    total += static_cast<double>(dataset_stats(data, make_signal(c.d, c.mu_norm), c.sigma_p).flipped) / c.n;
  }
  EXPECT_NEAR(total / 1000.0, 0.1, 0.01);
}

TEST(Dataset, StatsAreConsistent) {
  DataConfig c;
  const auto mu = make_signal(c.d, c.mu_norm);
  const Dataset data = generate_dataset(c, mu);
  const SetStats s = dataset_stats(data, mu, c.sigma_p);
  EXPECT_EQ(s.clean + s.flipped, c.n);
  EXPECT_EQ(s.positive + s.negative, c.n);
  EXPECT_EQ(s.clean_positive + s.clean_negative, s.clean);
  EXPECT_EQ(s.flipped_positive + s.flipped_negative, s.flipped);

  // Brute-force recount.
  double mn = INFINITY, mx = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double q = dot(data[i].xi(), data[i].xi());
    mn = std::min(mn, q);
    mx = std::max(mx, q);
    for (std::size_t k = 0; k < data.size(); ++k) {
      if (k != i) cross = std::max(cross, std::abs(dot(data[i].xi(), data[k].xi())));
    }
  }
  EXPECT_EQ(s.min_noise_sq, mn);
  EXPECT_EQ(s.max_noise_sq, mx);
  EXPECT_EQ(s.max_noise_cross, cross);
  EXPECT_EQ(s.noise_norm_violations, 0u);
  EXPECT_GE(s.min_noise_sq, 50.0);
  EXPECT_LE(s.max_noise_sq, 150.0);
  EXPECT_THROW(dataset_stats({}, mu, 1.0), std::invalid_argument);
}

TEST(TestPoints, CountAndFlips) {
  DataConfig c = small(1, 0.0);
  const Dataset clean = sample_test_points(c, 1000, 9);
  EXPECT_EQ(clean.size(), 1000u);
  for (const auto& pt : clean) EXPECT_EQ(pt.y, pt.y_hat);
  EXPECT_THROW(sample_test_points(c, 0, 9), std::invalid_argument);

  c.p = 0.1;
  c.d = 1;
  PointSampler sampler(c, make_signal(1, 1.0), 17);
  std::size_t flips = 0;
  for (int k = 0; k < 1000000; ++k) flips += sampler.next().flipped();
  EXPECT_NEAR(flips / 1e6, 0.1, 0.001);
}

TEST(TestPoints, IndependentOfTrainingSeed) {
  DataConfig c;
  const Dataset train = generate_dataset(c);
  const Dataset test = sample_test_points(c, c.n, 999);
  EXPECT_NE(train[0].xi()[0], test[0].xi()[0]);
}

TEST(Dataset, CsvRoundTrip) {
  DataConfig c;
  c.d = 7;
  const Dataset data = generate_dataset(c);
  const auto path = std::filesystem::temp_directory_path() / "benignlab_dataset_rt.csv";
  write_dataset_csv(path, data);
  const Dataset back = read_dataset_csv(path);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].patch1, data[i].patch1);
    EXPECT_EQ(back[i].patch2, data[i].patch2);
    EXPECT_EQ(back[i].y, data[i].y);
    EXPECT_EQ(back[i].y_hat, data[i].y_hat);
    EXPECT_EQ(back[i].signal_slot, data[i].signal_slot);
  }
  std::filesystem::remove(path);
}
