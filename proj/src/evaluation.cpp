// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "vericwety/error.hpp"

namespace vericwety::eval {

namespace {

double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_binary(std::span<const double> scores, std::span<const int> gold) {
  if (scores.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and gold differ in length");
  }
  bool pos = false, neg = false;
  for (int g : gold) {
    if (g != 0 && g != 1) throw Error(ErrorCode::kUnknownLabel, "binary gold must be 0 or 1");
    (g ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw Error(ErrorCode::kDegenerateLabels, "curves need both positive and negative examples");
  }
}

}  // namespace

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

long long ConfusionMatrix::trace() const {
  long long t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> predicted,
                          const std::vector<std::string>& label_space) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gold has " + std::to_string(gold.size()) +
                                                " labels, predictions " +
                                                std::to_string(predicted.size()));
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < label_space.size(); ++i) index.emplace(label_space[i], i);
  ConfusionMatrix cm{label_space, std::vector<std::vector<long long>>(
                                      label_space.size(), std::vector<long long>(label_space.size()))};
  for (std::size_t k = 0; k < gold.size(); ++k) {
    auto g = index.find(gold[k]);
    auto p = index.find(predicted[k]);
    if (g == index.end() || p == index.end()) {
      throw Error(ErrorCode::kUnknownLabel,
                  "label outside label space: " + (g == index.end() ? gold[k] : predicted[k]));
    }
    ++cm.counts[g->second][p->second];
  }
  return cm;
}

ConfusionMatrix confusion_binary(std::span<const int> gold, std::span<const int> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gold and predictions differ in length");
  }
  ConfusionMatrix cm{{"0", "1"}, {{0, 0}, {0, 0}}};
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if ((gold[k] != 0 && gold[k] != 1) || (predicted[k] != 0 && predicted[k] != 1)) {
      throw Error(ErrorCode::kUnknownLabel, "binary labels must be 0 or 1");
    }
    ++cm.counts[gold[k]][predicted[k]];
  }
  return cm;
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm) {
  const std::size_t k = cm.label_space.size();
  std::vector<ClassMetrics> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    long long tp = cm.counts[c][c];
    long long predicted = 0, support = 0;
    for (std::size_t r = 0; r < k; ++r) predicted += cm.counts[r][c];
    for (std::size_t j = 0; j < k; ++j) support += cm.counts[c][j];
    ClassMetrics m;
    m.label = cm.label_space[c];
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, support);
    m.f1 = f1_score(m.precision, m.recall);
    m.support = support;
    out.push_back(std::move(m));
  }
  return out;
}

Aggregates aggregate(const std::vector<ClassMetrics>& per_class, const ConfusionMatrix& cm) {
  Aggregates a;
  const long long total = cm.total();
  a.accuracy = ratio(cm.trace(), total);
  if (per_class.empty()) return a;

  double recall_sum = 0.0;
  std::size_t supported = 0;
  for (const auto& m : per_class) {
    a.macro.precision += m.precision;
    a.macro.recall += m.recall;
    a.macro.f1 += m.f1;
    a.weighted.precision += m.precision * static_cast<double>(m.support);
    a.weighted.recall += m.recall * static_cast<double>(m.support);
    a.weighted.f1 += m.f1 * static_cast<double>(m.support);
    if (m.support > 0) {
      recall_sum += m.recall;
      ++supported;
    }
  }
  const auto k = static_cast<double>(per_class.size());
  a.macro.precision /= k;
  a.macro.recall /= k;
  a.macro.f1 /= k;
  if (total > 0) {
    a.weighted.precision /= static_cast<double>(total);
    a.weighted.recall /= static_cast<double>(total);
    a.weighted.f1 /= static_cast<double>(total);
  }
  a.balanced_accuracy = supported ? recall_sum / static_cast<double>(supported) : 0.0;
  return a;
}

EvaluationReport make_report(std::string title, const ConfusionMatrix& cm) {
  EvaluationReport r;
  r.title = std::move(title);
  r.confusion = cm;
  r.per_class = class_metrics(cm);
  r.aggregates = aggregate(r.per_class, cm);
  return r;
}

std::vector<PrPoint> pr_curve(std::span<const double> scores, std::span<const int> gold) {
  check_binary(scores, gold);
  std::vector<std::pair<double, int>> pairs;
  pairs.reserve(scores.size());
  long long positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    pairs.emplace_back(scores[i], gold[i]);
    positives += gold[i];
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  // Walk thresholds from the top: at a distinct score s everything >= s is positive.
  std::vector<PrPoint> points;
  double max_score = pairs.front().first;
  points.push_back({std::nextafter(max_score, INFINITY), 1.0, 0.0});
  long long tp = 0, fp = 0;
  for (std::size_t i = 0; i < pairs.size();) {
    double s = pairs[i].first;
    while (i < pairs.size() && pairs[i].first == s) {
      (pairs[i].second ? tp : fp) += 1;
      ++i;
    }
    points.push_back({s, ratio(tp, tp + fp), ratio(tp, positives)});
  }
  if (pairs.back().first > 0.0) points.push_back({0.0, ratio(tp, tp + fp), 1.0});
  std::reverse(points.begin(), points.end());
  return points;
}

std::vector<SweepRow> threshold_sweep(std::span<const double> scores, std::span<const int> gold,
                                      std::span<const double> grid) {
  check_binary(scores, gold);
  std::vector<double> pos_scores, neg_scores;
  for (std::size_t i = 0; i < scores.size(); ++i) (gold[i] ? pos_scores : neg_scores).push_back(scores[i]);
  std::sort(pos_scores.begin(), pos_scores.end());
  std::sort(neg_scores.begin(), neg_scores.end());
  const auto n_pos = static_cast<long long>(pos_scores.size());
  const auto n_neg = static_cast<long long>(neg_scores.size());

  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) {
    SweepRow r;
    r.threshold = t;
    r.fn = std::lower_bound(pos_scores.begin(), pos_scores.end(), t) - pos_scores.begin();
    r.tn = std::lower_bound(neg_scores.begin(), neg_scores.end(), t) - neg_scores.begin();
    r.tp = n_pos - r.fn;
    r.fp = n_neg - r.tn;
    r.precision = ratio(r.tp, r.tp + r.fp);
    r.recall = ratio(r.tp, n_pos);
    r.f1 = f1_score(r.precision, r.recall);
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  grid.push_back(1.01);
  return grid;
}

}  // namespace vericwety::eval
