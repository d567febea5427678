// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vericwety::eval {

/// Rows are gold labels, columns predictions, both in label_space order.
struct ConfusionMatrix {
  std::vector<std::string> label_space;
  std::vector<std::vector<long long>> counts;

  long long total() const;
  long long trace() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long support = 0;

  bool operator==(const ClassMetrics&) const = default;
};

struct Averages {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool operator==(const Averages&) const = default;
};

struct Aggregates {
  double accuracy = 0.0;
  Averages macro;
  Averages weighted;
  double balanced_accuracy = 0.0;
  bool operator==(const Aggregates&) const = default;
};

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool operator==(const PrPoint&) const = default;
};

struct SweepRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;
  bool operator==(const SweepRow&) const = default;
};

struct Curves {
  std::vector<PrPoint> pr_curve;
  std::vector<SweepRow> threshold_sweep;
  bool operator==(const Curves&) const = default;
};

struct EvaluationReport {
  std::string title;
  std::vector<ClassMetrics> per_class;
  Aggregates aggregates;
  ConfusionMatrix confusion;
  std::optional<Curves> curves;

  bool operator==(const EvaluationReport&) const = default;
};

/// Throws LengthMismatch or UnknownLabel.
ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> predicted,
                          const std::vector<std::string>& label_space);
ConfusionMatrix confusion_binary(std::span<const int> gold, std::span<const int> predicted);

/// Zero denominators yield 0; f1 is the harmonic mean when P + R > 0.
std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm);
double f1_score(double precision, double recall);

/// Macro averages are unweighted over every class of the matrix; weighted
/// averages use supports; balanced accuracy averages recall over classes with
/// nonzero support.
Aggregates aggregate(const std::vector<ClassMetrics>& per_class, const ConfusionMatrix& cm);

EvaluationReport make_report(std::string title, const ConfusionMatrix& cm);

/// Prediction rule: positive iff score >= threshold. Points are evaluated at
/// 0, every distinct score, and just above the maximum score (where nothing is
/// predicted positive and precision is 1 by convention). Sorted by threshold.
/// Throws DegenerateLabels when gold lacks either class.
std::vector<PrPoint> pr_curve(std::span<const double> scores, std::span<const int> gold);

std::vector<SweepRow> threshold_sweep(std::span<const double> scores, std::span<const int> gold,
                                      std::span<const double> grid);

/// 0.00, 0.05, ..., 1.00 plus 1.01.
std::vector<double> default_threshold_grid();

}  // namespace vericwety::eval
