// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vericwety/corpus.hpp"
#include "vericwety/gbdt.hpp"
#include "vericwety/store.hpp"

namespace vericwety::classifier {

using gbdt::FeatureMatrix;
using gbdt::GbdtConfig;

enum class Task { kModuleMulticlass, kLineBinary };
enum class SplitStrategy { kStratifiedByLabel, kGroupByDesign };

/// How line features are assembled from the store.
enum class LineFeatureMode { kLineOnly, kLineAndModule };

std::string_view task_name(Task task);
Task task_from_name(std::string_view name);
std::string_view feature_mode_name(LineFeatureMode mode);
LineFeatureMode feature_mode_from_name(std::string_view name);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  SplitStrategy strategy = SplitStrategy::kStratifiedByLabel;
};

struct SplitItem {
  std::string group;  // design id
  std::string label;
};

struct SplitResult {
  std::vector<std::size_t> train;  // ascending indices into the input
  std::vector<std::size_t> test;
};

/// Stratified: per-class quotas by largest remainder, so |train| is within 1
/// of round(f*N) and every class within 1 of its exact share; classes with a
/// single member go to train. Grouped: whole designs are assigned, the number
/// of training designs being round(f*G).
SplitResult split_dataset(std::span<const SplitItem> items, const SplitSpec& spec);

/// negatives / positives; throws DegenerateLabels when either class is absent.
double auto_pos_weight(std::span<const std::uint8_t> labels);

struct TrainingMetadata {
  std::string dataset_sha256;
  std::uint64_t split_seed = 0;
  std::string backend_id;
  std::size_t train_rows = 0;
  bool operator==(const TrainingMetadata&) const = default;
};

struct TrainedModel {
  Task task = Task::kLineBinary;
  std::vector<std::string> label_space;  // binary: {"0", "1"}
  GbdtConfig config;
  std::size_t feature_dim = 0;
  LineFeatureMode feature_mode = LineFeatureMode::kLineAndModule;  // line task only
  TrainingMetadata metadata;
  /// One ensemble for the binary task, one per label (one-vs-rest) otherwise.
  std::vector<gbdt::BinaryBooster> ensembles;

  bool operator==(const TrainedModel&) const = default;
};

/// `targets` index into `label_space`. Binary tasks use label_space {"0","1"}.
/// Throws DegenerateLabels when fewer than two classes occur and
/// DimensionMismatch for an empty feature matrix.
TrainedModel train(const FeatureMatrix& features, std::span<const int> targets,
                   std::vector<std::string> label_space, const GbdtConfig& config, Task task);

std::string dataset_hash(const FeatureMatrix& features, std::span<const int> targets);

/// LINE_BINARY: one probability. MODULE_MULTICLASS: one score per label.
std::vector<double> predict_proba(const TrainedModel& model, std::span<const float> features);

/// Index into label_space: binary is 1 iff score >= threshold; multi-class is
/// the argmax with ties resolved toward the earlier label.
int predict_label(const TrainedModel& model, std::span<const float> features,
                  double threshold = 0.5);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
std::string serialize_model(const TrainedModel& model);

/// Module feature row for a design, read from the store.
std::vector<float> module_features(const embed::EmbeddingStore& store, const std::string& design_id);
/// Feature row for one line in the given mode.
std::vector<float> line_features(const embed::EmbeddingStore& store, const std::string& design_id,
                                 int line_no, LineFeatureMode mode);

struct DesignPrediction {
  std::string module_label;
  std::vector<int> buggy_lines;
  std::vector<double> line_scores;  // empty when stage 2 was skipped
  bool line_stage_ran = false;
};

/// Two-stage inference: the module model picks the CWE; unless it is NONE the
/// line model scores every line and lines scoring >= threshold are returned.
/// Throws MissingEmbeddings when the design is not in the store.
DesignPrediction predict_design(const TrainedModel& module_model, const TrainedModel& line_model,
                                const std::string& design_id, const embed::EmbeddingStore& store,
                                double threshold = 0.5);

}  // namespace vericwety::classifier
