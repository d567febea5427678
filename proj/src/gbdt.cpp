// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/gbdt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "vericwety/error.hpp"
#include "vericwety/parallel.hpp"

namespace vericwety::gbdt {

using nlohmann::json;

namespace {

constexpr double kMinSplitGain = 1e-6;
constexpr std::size_t kMaxCutSample = 200000;

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  int bin = 0;  // rows with bin < this go left
};

struct NodeWork {
  std::int32_t index = 0;
  int depth = 0;
  std::vector<std::uint32_t> rows;
  double grad = 0.0;
  double hess = 0.0;
};

double leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

double score(double g, double h, double lambda) { return g * g / (h + lambda); }

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double sigmoid(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

void GbdtConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (n_estimators <= 0) fail("n_estimators must be positive");
  if (max_depth <= 0) fail("max_depth must be positive");
  if (!(learning_rate > 0)) fail("learning_rate must be positive");
  if (!(subsample > 0 && subsample <= 1)) fail("subsample must be in (0, 1]");
  if (!(colsample > 0 && colsample <= 1)) fail("colsample must be in (0, 1]");
  if (!(min_child_weight > 0)) fail("min_child_weight must be positive");
  if (!(l2_lambda > 0)) fail("l2_lambda must be positive");
  if (tree_method != "hist") fail("only the histogram tree method is implemented");
  if (eval_metric != "logloss") fail("only logloss is supported as eval_metric");
  if (scale_pos_weight && !(*scale_pos_weight > 0)) fail("scale_pos_weight must be positive");
  if (max_bins < 2 || max_bins > 256) fail("max_bins must be in [2, 256]");
  if (n_threads < 0) fail("n_threads must be >= 0");
}

json to_json(const GbdtConfig& c) {
  return json{{"n_estimators", c.n_estimators},
              {"max_depth", c.max_depth},
              {"learning_rate", c.learning_rate},
              {"subsample", c.subsample},
              {"colsample", c.colsample},
              {"min_child_weight", c.min_child_weight},
              {"l2_lambda", c.l2_lambda},
              {"tree_method", c.tree_method},
              {"eval_metric", c.eval_metric},
              {"random_state", c.random_state},
              {"scale_pos_weight", c.scale_pos_weight ? json(*c.scale_pos_weight) : json("AUTO")},
              {"max_bins", c.max_bins}};
}

GbdtConfig config_from_json(const json& j, GbdtConfig c) {
  c.n_estimators = j.value("n_estimators", c.n_estimators);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.subsample = j.value("subsample", c.subsample);
  c.colsample = j.value("colsample", c.colsample);
  c.min_child_weight = j.value("min_child_weight", c.min_child_weight);
  c.l2_lambda = j.value("l2_lambda", c.l2_lambda);
  c.tree_method = j.value("tree_method", c.tree_method);
  c.eval_metric = j.value("eval_metric", c.eval_metric);
  c.random_state = j.value("random_state", c.random_state);
  c.max_bins = j.value("max_bins", c.max_bins);
  c.n_threads = j.value("n_threads", c.n_threads);
  if (auto it = j.find("scale_pos_weight"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "AUTO") {
        throw Error(ErrorCode::kInvalidArgument, "scale_pos_weight must be a number or \"AUTO\"");
      }
      c.scale_pos_weight.reset();
    } else {
      c.scale_pos_weight = it->get<double>();
    }
  }
  c.validate();
  return c;
}

QuantizedMatrix quantize(const FeatureMatrix& x, int max_bins) {
  if (max_bins < 2 || max_bins > 256) {
    throw Error(ErrorCode::kInvalidArgument, "max_bins must be in [2, 256]");
  }
  QuantizedMatrix q;
  q.rows = x.rows;
  q.cols = x.cols;
  q.bins.resize(x.rows * x.cols);
  q.cuts.resize(x.cols);

  // Deterministic strided sample of rows for cut estimation.
  std::size_t stride = std::max<std::size_t>(1, (x.rows + kMaxCutSample - 1) / kMaxCutSample);
  std::vector<float> column;
  for (std::size_t f = 0; f < x.cols; ++f) {
    column.clear();
    for (std::size_t r = 0; r < x.rows; r += stride) column.push_back(x.values[r * x.cols + f]);
    std::sort(column.begin(), column.end());
    auto& cuts = q.cuts[f];

    std::vector<float> distinct(column.begin(), column.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      cuts.assign(distinct.begin() + (distinct.empty() ? 0 : 1), distinct.end());
    } else {
      for (int k = 1; k < max_bins; ++k) {
        float c = column[static_cast<std::size_t>(k) * column.size() / static_cast<std::size_t>(max_bins)];
        if (c > column.front() && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
      }
    }

    for (std::size_t r = 0; r < x.rows; ++r) {
      float v = x.values[r * x.cols + f];
      auto b = std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin();
      q.bins[f * x.rows + r] = static_cast<std::uint8_t>(b);
    }
  }
  return q;
}

double Tree::predict(std::span<const float> row) const {
  std::int32_t n = 0;
  while (feature[n] >= 0) n = row[feature[n]] < threshold[n] ? left[n] : right[n];
  return value[n];
}

double BinaryBooster::margin(std::span<const float> row) const {
  double m = base_margin;
  for (const auto& t : trees) m += t.predict(row);
  return m;
}

double BinaryBooster::predict_proba(std::span<const float> row) const { return sigmoid(margin(row)); }

json to_json(const BinaryBooster& b) {
  json trees = json::array();
  for (const auto& t : b.trees) {
    trees.push_back(json{{"feature", t.feature},
                         {"threshold", t.threshold},
                         {"left", t.left},
                         {"right", t.right},
                         {"value", t.value}});
  }
  return json{{"base_margin", b.base_margin},
              {"pos_weight", b.pos_weight},
              {"train_logloss", b.train_logloss},
              {"trees", trees}};
}

BinaryBooster booster_from_json(const json& j) {
  BinaryBooster b;
  b.base_margin = j.at("base_margin").get<double>();
  b.pos_weight = j.at("pos_weight").get<double>();
  b.train_logloss = j.at("train_logloss").get<std::vector<double>>();
  for (const auto& t : j.at("trees")) {
    Tree tree;
    tree.feature = t.at("feature").get<std::vector<std::int32_t>>();
    tree.threshold = t.at("threshold").get<std::vector<float>>();
    tree.left = t.at("left").get<std::vector<std::int32_t>>();
    tree.right = t.at("right").get<std::vector<std::int32_t>>();
    tree.value = t.at("value").get<std::vector<double>>();
    auto n = tree.feature.size();
    if (tree.threshold.size() != n || tree.left.size() != n || tree.right.size() != n ||
        tree.value.size() != n || n == 0) {
      throw Error(ErrorCode::kFormat, "inconsistent tree arrays in model artifact");
    }
    b.trees.push_back(std::move(tree));
  }
  return b;
}

BinaryBooster train_binary(const QuantizedMatrix& x, std::span<const std::uint8_t> y,
                           const GbdtConfig& config, double pos_weight, std::uint64_t seed) {
  config.validate();
  if (y.size() != x.rows) throw Error(ErrorCode::kLengthMismatch, "target count differs from rows");
  if (x.rows == 0) throw Error(ErrorCode::kTooFewExamples, "empty training set");
  if (!(pos_weight > 0)) throw Error(ErrorCode::kInvalidArgument, "pos_weight must be positive");

  const std::size_t n = x.rows;
  const double lambda = config.l2_lambda;
  const double mcw = config.min_child_weight;
  const std::size_t workers =
      config.n_threads > 0 ? static_cast<std::size_t>(config.n_threads) : default_workers();
  const std::size_t n_cols_tree =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(config.colsample * x.cols)));

  BinaryBooster booster;
  booster.pos_weight = pos_weight;
  SplitMix64 rng(seed);

  std::vector<double> margin(n, booster.base_margin);
  std::vector<double> grad(n), hess(n);
  std::vector<std::uint32_t> all_cols(x.cols);
  std::iota(all_cols.begin(), all_cols.end(), 0U);

  for (int round = 0; round < config.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margin[i]);
      double w = y[i] ? pos_weight : 1.0;
      grad[i] = (p - static_cast<double>(y[i])) * w;
      hess[i] = std::max(p * (1.0 - p), 1e-16) * w;
    }

    NodeWork root;
    root.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (config.subsample >= 1.0 || rng.uniform() < config.subsample) {
        root.rows.push_back(static_cast<std::uint32_t>(i));
      }
    }
    // Partial Fisher-Yates picks this tree's feature subset.
    std::vector<std::uint32_t> cols = all_cols;
    for (std::size_t k = 0; k < n_cols_tree && k + 1 < cols.size(); ++k) {
      std::swap(cols[k], cols[k + rng.below(cols.size() - k)]);
    }
    cols.resize(n_cols_tree);
    std::sort(cols.begin(), cols.end());

    for (auto r : root.rows) {
      root.grad += grad[r];
      root.hess += hess[r];
    }

    Tree tree;
    std::vector<int> split_bin;
    auto new_node = [&]() {
      tree.feature.push_back(-1);
      tree.threshold.push_back(0.0f);
      tree.left.push_back(-1);
      tree.right.push_back(-1);
      tree.value.push_back(0.0);
      split_bin.push_back(0);
      return static_cast<std::int32_t>(tree.feature.size() - 1);
    };
    root.index = new_node();

    std::vector<NodeWork> level;
    level.push_back(std::move(root));
    std::vector<SplitCandidate> per_feature(cols.size());
    std::vector<double> node_g, node_h;

    while (!level.empty()) {
      std::vector<NodeWork> next;
      for (auto& node : level) {
        SplitCandidate best;
        if (node.depth < config.max_depth && node.hess >= 2 * mcw && !node.rows.empty()) {
          node_g.resize(node.rows.size());
          node_h.resize(node.rows.size());
          for (std::size_t k = 0; k < node.rows.size(); ++k) {
            node_g[k] = grad[node.rows[k]];
            node_h[k] = hess[node.rows[k]];
          }
          const double parent = score(node.grad, node.hess, lambda);
          parallel_for(cols.size(), workers, [&](std::size_t ci) {
            const std::uint32_t f = cols[ci];
            const auto& cuts = x.cuts[f];
            SplitCandidate cand;
            if (!cuts.empty()) {
              std::array<double, 256> hg{};
              std::array<double, 256> hh{};
              const std::uint8_t* col = x.bins.data() + static_cast<std::size_t>(f) * n;
              const auto& rows = node.rows;
              for (std::size_t k = 0; k < rows.size(); ++k) {
                auto b = col[rows[k]];
                hg[b] += node_g[k];
                hh[b] += node_h[k];
              }
              double gl = 0.0, hl = 0.0;
              for (std::size_t j = 1; j <= cuts.size(); ++j) {
                gl += hg[j - 1];
                hl += hh[j - 1];
                double gr = node.grad - gl;
                double hr = node.hess - hl;
                if (hl < mcw) continue;
                if (hr < mcw) break;
                double gain = score(gl, hl, lambda) + score(gr, hr, lambda) - parent;
                if (gain > cand.gain) cand = {gain, static_cast<int>(f), static_cast<int>(j)};
              }
            }
            per_feature[ci] = cand;
          });
          for (const auto& c : per_feature) {
            if (c.feature >= 0 && c.gain > best.gain) best = c;
          }
        }

        if (best.feature < 0 || best.gain <= kMinSplitGain) {
          tree.value[node.index] =
              config.learning_rate * leaf_weight(node.grad, node.hess, lambda);
          continue;
        }

        tree.feature[node.index] = best.feature;
        tree.threshold[node.index] = x.cuts[best.feature][best.bin - 1];
        split_bin[node.index] = best.bin;
        NodeWork l, r;
        l.depth = r.depth = node.depth + 1;
        const std::uint8_t* col = x.bins.data() + static_cast<std::size_t>(best.feature) * n;
        for (auto row : node.rows) {
          auto& side = col[row] < best.bin ? l : r;
          side.rows.push_back(row);
          side.grad += grad[row];
          side.hess += hess[row];
        }
        l.index = new_node();
        r.index = new_node();
        tree.left[node.index] = l.index;
        tree.right[node.index] = r.index;
        next.push_back(std::move(l));
        next.push_back(std::move(r));
      }
      level = std::move(next);
    }

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t node = 0;
      while (tree.feature[node] >= 0) {
        node = x.bin(tree.feature[node], i) < split_bin[node] ? tree.left[node] : tree.right[node];
      }
      margin[i] += tree.value[node];
      double p = std::clamp(sigmoid(margin[i]), 1e-15, 1.0 - 1e-15);
      loss -= y[i] ? std::log(p) : std::log(1.0 - p);
    }
    booster.train_logloss.push_back(loss / static_cast<double>(n));
    booster.trees.push_back(std::move(tree));
  }
  return booster;
}

}  // namespace vericwety::gbdt
