// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace vericwety::gbdt {

/// Boosting hyperparameters. Defaults are the reference configuration:
/// 300 rounds of depth-6 trees at learning rate 0.1, 0.8 row and column
/// sampling, minimum child hessian 3, L2 penalty 1, histogram splits.
struct GbdtConfig {
  int n_estimators = 300;
  int max_depth = 6;
  double learning_rate = 0.1;
  double subsample = 0.8;
  double colsample = 0.8;
  double min_child_weight = 3.0;
  double l2_lambda = 1.0;
  std::string tree_method = "hist";
  std::string eval_metric = "logloss";
  std::uint64_t random_state = 0;
  std::optional<double> scale_pos_weight;  // nullopt means AUTO (neg/pos)
  int max_bins = 256;
  int n_threads = 0;  // 0 = all cores; does not affect results

  void validate() const;
  bool operator==(const GbdtConfig&) const = default;
};

nlohmann::json to_json(const GbdtConfig& c);
/// Applies the keys present in `j` on top of `base`.
GbdtConfig config_from_json(const nlohmann::json& j, GbdtConfig base = {});

/// Dense row-major float matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0f) {}

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * cols, cols);
  }
  std::span<float> row(std::size_t i) { return std::span<float>(values).subspan(i * cols, cols); }
};

/// Training matrix quantized to per-feature histogram bins (column-major).
/// bin(x) counts the cut points <= x; a split at bin j sends x < cuts[j-1]
/// to the left child.
struct QuantizedMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bins;         // cols * rows
  std::vector<std::vector<float>> cuts;  // per feature, ascending

  std::uint8_t bin(std::size_t feature, std::size_t row) const { return bins[feature * rows + row]; }
};

QuantizedMatrix quantize(const FeatureMatrix& x, int max_bins = 256);

struct Tree {
  // Internal nodes have feature >= 0; leaves have feature == -1 and a value.
  std::vector<std::int32_t> feature;
  std::vector<float> threshold;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  std::vector<double> value;

  double predict(std::span<const float> row) const;
  std::size_t size() const { return feature.size(); }
  bool operator==(const Tree&) const = default;
};

/// Additive ensemble of regression trees under the binary logistic loss.
struct BinaryBooster {
  std::vector<Tree> trees;
  double base_margin = 0.0;
  double pos_weight = 1.0;
  std::vector<double> train_logloss;  // after each boosting round

  double margin(std::span<const float> row) const;
  double predict_proba(std::span<const float> row) const;
  bool operator==(const BinaryBooster&) const = default;
};

nlohmann::json to_json(const BinaryBooster& b);
BinaryBooster booster_from_json(const nlohmann::json& j);

/// Fits a booster on quantized features and 0/1 targets. Positives carry
/// weight `pos_weight`. Deterministic for a given seed.
BinaryBooster train_binary(const QuantizedMatrix& x, std::span<const std::uint8_t> y,
                           const GbdtConfig& config, double pos_weight, std::uint64_t seed);

double sigmoid(double margin);

/// Uniform double in [0, 1) and bounded integers from a 64-bit engine, defined
/// here rather than via <random> distributions so results match across
/// standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace vericwety::gbdt
