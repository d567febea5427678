// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vericwety/classifier.hpp"
#include "vericwety/embeddings.hpp"
#include "vericwety/evaluation.hpp"
#include "vericwety/labeling.hpp"
#include "vericwety/store.hpp"

namespace vericwety::pipeline {

namespace fs = std::filesystem;

struct EmbeddingSettings {
  std::string backend = "fallback";  // "fallback" or "remote"
  std::size_t dimension = 256;
  std::size_t ngram = 3;
  std::optional<embed::RemoteBackendConfig> remote;
};

/// Run configuration. Relative paths in the file resolve against the file's
/// directory; the parsed paths here are already absolute or cwd-relative.
struct PipelineConfig {
  fs::path config_path;
  std::vector<fs::path> corpus;
  std::string taxonomy = "v2";
  fs::path providers;
  std::optional<fs::path> prompt_template;
  EmbeddingSettings embedding;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  nlohmann::json gbdt = nlohmann::json::object();         // applied to both tasks
  nlohmann::json module_gbdt = nlohmann::json::object();  // then per task
  nlohmann::json line_gbdt = nlohmann::json::object();
  classifier::LineFeatureMode line_features = classifier::LineFeatureMode::kLineAndModule;
  double threshold = 0.5;
  fs::path out_dir = "out";
  std::size_t workers = 0;  // 0 = hardware concurrency

  /// The effective configuration as recorded in run manifests.
  nlohmann::json snapshot() const;
};

PipelineConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir);
PipelineConfig load_config(const fs::path& path);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<std::string> backend;
  std::optional<fs::path> out_dir;
};
void apply(PipelineConfig& config, const Overrides& overrides);

/// Artifact locations under out_dir.
struct Layout {
  fs::path root;
  fs::path corpus_manifest() const { return root / "corpus_manifest.jsonl"; }
  fs::path votes() const { return root / "votes.jsonl"; }
  fs::path module_labels() const { return root / "module_labels.jsonl"; }
  fs::path line_labels() const { return root / "line_labels.jsonl"; }
  fs::path store() const { return root / "store"; }
  fs::path split() const { return root / "split.json"; }
  fs::path model(classifier::Task task) const;
  fs::path reports() const { return root / "reports"; }
  fs::path run_manifest() const { return root / "run_manifest.jsonl"; }
};
Layout layout(const PipelineConfig& config);

/// GBDT settings for a task: defaults, then `gbdt`, then the task block. The
/// random state defaults to the run seed.
gbdt::GbdtConfig gbdt_config(const PipelineConfig& config, classifier::Task task);

std::vector<corpus::DesignUnit> load_units(const PipelineConfig& config);

struct LabelSummary {
  std::size_t designs = 0;
  std::size_t unresolved = 0;
  std::map<std::string, std::size_t> histogram;
};
LabelSummary cmd_label(const PipelineConfig& config);

struct EmbedOptions {
  /// Stop after this many designs have been committed (used to exercise resume).
  std::optional<std::size_t> max_designs;
};
struct EmbedSummary {
  std::size_t designs_embedded = 0;
  std::size_t designs_skipped = 0;
  std::size_t vectors_written = 0;
};
EmbedSummary cmd_embed(const PipelineConfig& config, const EmbedOptions& options = {});

struct DesignSplit {
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::vector<std::string> train;
  std::vector<std::string> test;
};
DesignSplit cmd_split(const PipelineConfig& config);
DesignSplit read_split(const fs::path& path);

/// Rows for the line task over the given designs, in design then line order.
struct LineDataset {
  classifier::FeatureMatrix features;
  std::vector<int> targets;
  std::vector<std::string> design_ids;
};
LineDataset build_line_dataset(const embed::EmbeddingStore& store, const labeling::LineLabelSet& labels,
                               const std::vector<std::string>& designs,
                               classifier::LineFeatureMode mode);

classifier::TrainedModel cmd_train(const PipelineConfig& config, classifier::Task task);
eval::EvaluationReport cmd_evaluate(const PipelineConfig& config, classifier::Task task);

struct Prediction {
  std::string design_id;
  classifier::DesignPrediction result;
};
Prediction cmd_predict(const PipelineConfig& config, const std::string& design_id);

std::vector<labeling::AgreementRow> cmd_agreement(const PipelineConfig& config, const fs::path& gold);
std::string agreement_table(const std::vector<labeling::AgreementRow>& rows);

/// Renders text tables and plot files for every report JSON present.
std::vector<fs::path> cmd_report(const PipelineConfig& config);

}  // namespace vericwety::pipeline
