// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vericwety/error.hpp"
#include "vericwety/gbdt.hpp"

using namespace vericwety;
using namespace vericwety::gbdt;

namespace {

struct Data {
  FeatureMatrix x;
  std::vector<std::uint8_t> y;
};

// Two features; the label is 1 above the line x0 + x1 = 0.
Data separable(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Data d{FeatureMatrix(n, 2), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    float a = u(rng), b = u(rng);
    d.x.row(i)[0] = a;
    d.x.row(i)[1] = b;
    d.y[i] = a + b > 0;
  }
  return d;
}

GbdtConfig small_config() {
  GbdtConfig c;
  c.n_estimators = 60;
  c.max_depth = 4;
  c.min_child_weight = 1.0;
  return c;
}

}  // namespace

TEST(Quantize, BinCountsCutPointsAtOrBelowValue) {
  FeatureMatrix x(5, 1);
  float vals[] = {3, 1, 2, 2, 5};
  for (int i = 0; i < 5; ++i) x.row(i)[0] = vals[i];
  auto q = quantize(x, 256);
  EXPECT_EQ(q.cuts[0], (std::vector<float>{2, 3, 5}));
  std::vector<int> bins;
  for (int i = 0; i < 5; ++i) bins.push_back(q.bin(0, i));
  EXPECT_EQ(bins, (std::vector<int>{2, 0, 1, 1, 3}));
}

TEST(Quantize, RespectsBinLimitAndOrder) {
  std::mt19937 rng(1);
  std::normal_distribution<float> dist;
  FeatureMatrix x(2000, 3);
  for (auto& v : x.values) v = dist(rng);
  auto q = quantize(x, 16);
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_LE(q.cuts[f].size(), 15u);
    EXPECT_TRUE(std::is_sorted(q.cuts[f].begin(), q.cuts[f].end()));
    for (std::size_t r = 0; r < x.rows; ++r) {
      int b = q.bin(f, r);
      float v = x.row(r)[f];
      if (b > 0) {
        EXPECT_LE(q.cuts[f][b - 1], v);
      }
      if (b < static_cast<int>(q.cuts[f].size())) {
        EXPECT_LT(v, q.cuts[f][b]);
      }
    }
  }
  EXPECT_THROW(quantize(x, 1), Error);
}

TEST(TrainBinary, LearnsSeparableData) {
  auto d = separable(600, 3);
  auto q = quantize(d.x);
  auto b = train_binary(q, d.y, small_config(), 1.0, 7);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.x.rows; ++i) correct += (b.predict_proba(d.x.row(i)) >= 0.5) == (d.y[i] != 0);
  EXPECT_GE(static_cast<double>(correct) / d.x.rows, 0.99);
  ASSERT_EQ(b.train_logloss.size(), 60u);
  EXPECT_LT(b.train_logloss.back(), b.train_logloss.front());

  auto test = separable(400, 4);
  correct = 0;
  for (std::size_t i = 0; i < test.x.rows; ++i) {
    correct += (b.predict_proba(test.x.row(i)) >= 0.5) == (test.y[i] != 0);
  }
  EXPECT_GE(static_cast<double>(correct) / test.x.rows, 0.85);
}

TEST(TrainBinary, ConstantFeaturesPredictThePrior) {
  FeatureMatrix x(400, 3);
  std::vector<std::uint8_t> y(400, 0);
  for (std::size_t i = 0; i < 100; ++i) y[i] = 1;
  auto b = train_binary(quantize(x), y, small_config(), 1.0, 1);
  EXPECT_NEAR(b.predict_proba(x.row(0)), 0.25, 0.02);
}

TEST(TrainBinary, PositiveWeightShiftsThePrior) {
  FeatureMatrix x(400, 1);
  std::vector<std::uint8_t> y(400, 0);
  for (std::size_t i = 0; i < 100; ++i) y[i] = 1;
  auto b = train_binary(quantize(x), y, small_config(), 3.0, 1);
  EXPECT_NEAR(b.predict_proba(x.row(0)), 0.5, 0.02);
}

TEST(TrainBinary, DeterministicPerSeedAndThreadCount) {
  auto d = separable(300, 8);
  auto q = quantize(d.x);
  auto c1 = small_config();
  c1.n_threads = 1;
  auto c4 = c1;
  c4.n_threads = 4;
  auto a = train_binary(q, d.y, c1, 1.0, 11);
  EXPECT_EQ(a, train_binary(q, d.y, c1, 1.0, 11));
  EXPECT_EQ(a, train_binary(q, d.y, c4, 1.0, 11));
  EXPECT_NE(a, train_binary(q, d.y, c1, 1.0, 12));
}

TEST(TrainBinary, EmptyInputThrows) {
  FeatureMatrix x(0, 2);
  std::vector<std::uint8_t> y;
  EXPECT_THROW(train_binary(quantize(x), y, small_config(), 1.0, 0), Error);
}

TEST(Booster, JsonRoundTripPreservesPredictions) {
  auto d = separable(200, 2);
  auto b = train_binary(quantize(d.x), d.y, small_config(), 1.5, 3);
  auto back = booster_from_json(nlohmann::json::parse(to_json(b).dump()));
  EXPECT_EQ(back.trees, b.trees);
  EXPECT_EQ(back.base_margin, b.base_margin);
  for (std::size_t i = 0; i < d.x.rows; ++i) EXPECT_EQ(back.margin(d.x.row(i)), b.margin(d.x.row(i)));
}

TEST(GbdtConfig, DefaultsAndOverrides) {
  GbdtConfig c;
  EXPECT_EQ(c.n_estimators, 300);
  EXPECT_EQ(c.max_depth, 6);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.1);
  EXPECT_DOUBLE_EQ(c.subsample, 0.8);
  EXPECT_DOUBLE_EQ(c.colsample, 0.8);
  EXPECT_FALSE(c.scale_pos_weight.has_value());
  auto o = config_from_json(nlohmann::json{{"max_depth", 3}, {"scale_pos_weight", 2.0}});
  EXPECT_EQ(o.max_depth, 3);
  EXPECT_EQ(o.n_estimators, 300);
  EXPECT_EQ(*o.scale_pos_weight, 2.0);
  EXPECT_EQ(config_from_json(to_json(o)), o);
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(SplitMix64, UniformInRange) {
  SplitMix64 rng(42);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
  EXPECT_NEAR(sigmoid(0.0), 0.5, 1e-12);
}
