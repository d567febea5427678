// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/classifier.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "vericwety/error.hpp"
#include "vericwety/hashing.hpp"
#include "vericwety/io.hpp"

namespace vericwety::classifier {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModelFormat = "vericwety-model/1";

template <typename T>
void shuffle(std::vector<T>& v, gbdt::SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  gbdt::SplitMix64 mix(base ^ (stream * 0xD1B54A32D192ED03ULL));
  return mix.next();
}

}  // namespace

std::string_view task_name(Task task) {
  return task == Task::kModuleMulticlass ? "MODULE_MULTICLASS" : "LINE_BINARY";
}

Task task_from_name(std::string_view name) {
  if (name == "MODULE_MULTICLASS" || name == "module") return Task::kModuleMulticlass;
  if (name == "LINE_BINARY" || name == "line") return Task::kLineBinary;
  throw Error(ErrorCode::kInvalidArgument, "unknown task " + std::string(name));
}

std::string_view feature_mode_name(LineFeatureMode mode) {
  return mode == LineFeatureMode::kLineOnly ? "line" : "line+module";
}

LineFeatureMode feature_mode_from_name(std::string_view name) {
  if (name == "line") return LineFeatureMode::kLineOnly;
  if (name == "line+module") return LineFeatureMode::kLineAndModule;
  throw Error(ErrorCode::kInvalidArgument, "unknown line feature mode " + std::string(name));
}

SplitResult split_dataset(std::span<const SplitItem> items, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train_fraction must be in (0, 1)");
  }
  if (items.size() < 5) {
    throw Error(ErrorCode::kTooFewExamples,
                "need at least 5 examples to split, got " + std::to_string(items.size()));
  }
  gbdt::SplitMix64 rng(spec.seed);
  const double f = spec.train_fraction;
  std::vector<std::uint8_t> in_train(items.size(), 0);

  if (spec.strategy == SplitStrategy::kStratifiedByLabel) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < items.size(); ++i) by_class[items[i].label].push_back(i);

    struct Quota {
      std::vector<std::size_t>* members;
      std::size_t take;
      double remainder;
      bool singleton;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (auto& [label, members] : by_class) {
      shuffle(members, rng);
      if (members.size() < 2) {
        spdlog::warn("class {} has a single example; it goes to the training split", label);
        quotas.push_back({&members, members.size(), 0.0, true});
      } else {
        double exact = f * static_cast<double>(members.size());
        auto take = static_cast<std::size_t>(std::floor(exact));
        quotas.push_back({&members, take, exact - static_cast<double>(take), false});
      }
      assigned += quotas.back().take;
    }
    auto target = static_cast<std::size_t>(std::llround(f * static_cast<double>(items.size())));
    std::vector<std::size_t> order(quotas.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return quotas[a].remainder > quotas[b].remainder;
    });
    for (std::size_t k : order) {
      if (assigned >= target) break;
      auto& q = quotas[k];
      if (q.singleton || q.take >= q.members->size() || q.remainder <= 0.0) continue;
      ++q.take;
      ++assigned;
    }
    for (const auto& q : quotas) {
      for (std::size_t k = 0; k < q.take; ++k) in_train[(*q.members)[k]] = 1;
    }
  } else {
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < items.size(); ++i) by_group[items[i].group].push_back(i);
    std::vector<const std::vector<std::size_t>*> groups;
    for (const auto& [g, members] : by_group) groups.push_back(&members);
    if (groups.size() < 2) {
      throw Error(ErrorCode::kTooFewExamples, "group split needs at least 2 designs");
    }
    shuffle(groups, rng);
    auto target = static_cast<std::size_t>(std::llround(f * static_cast<double>(groups.size())));
    target = std::clamp<std::size_t>(target, 1, groups.size() - 1);
    for (std::size_t k = 0; k < target; ++k) {
      for (auto i : *groups[k]) in_train[i] = 1;
    }
  }

  SplitResult out;
  for (std::size_t i = 0; i < items.size(); ++i) (in_train[i] ? out.train : out.test).push_back(i);
  return out;
}

double auto_pos_weight(std::span<const std::uint8_t> labels) {
  std::size_t pos = 0;
  for (auto l : labels) pos += l != 0;
  std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kDegenerateLabels, "auto_pos_weight needs both positive and negative labels");
  }
  return static_cast<double>(neg) / static_cast<double>(pos);
}

std::string dataset_hash(const FeatureMatrix& features, std::span<const int> targets) {
  Sha256 h;
  std::uint64_t dims[2] = {features.rows, features.cols};
  h.update(dims, sizeof(dims));
  h.update(features.values.data(), features.values.size() * sizeof(float));
  h.update(targets.data(), targets.size() * sizeof(int));
  return h.hex_digest();
}

TrainedModel train(const FeatureMatrix& features, std::span<const int> targets,
                   std::vector<std::string> label_space, const GbdtConfig& config, Task task) {
  config.validate();
  if (features.cols == 0) throw Error(ErrorCode::kDimensionMismatch, "feature matrix has no columns");
  if (targets.size() != features.rows) {
    throw Error(ErrorCode::kLengthMismatch, "targets and feature rows differ");
  }
  for (float v : features.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite training feature");
  }
  if (task == Task::kLineBinary && label_space.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "binary task needs a two-label space");
  }
  std::vector<std::size_t> counts(label_space.size(), 0);
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= label_space.size()) {
      throw Error(ErrorCode::kUnknownLabel, "target outside the label space");
    }
    ++counts[t];
  }
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw Error(ErrorCode::kDegenerateLabels, "training data contains a single class");
  }

  TrainedModel model;
  model.task = task;
  model.label_space = std::move(label_space);
  model.config = config;
  model.feature_dim = features.cols;
  model.metadata.dataset_sha256 = dataset_hash(features, targets);
  model.metadata.split_seed = config.random_state;
  model.metadata.train_rows = features.rows;

  auto q = gbdt::quantize(features, config.max_bins);
  auto fit = [&](std::size_t positive_class, std::uint64_t stream) {
    std::vector<std::uint8_t> y(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) y[i] = static_cast<std::size_t>(targets[i]) == positive_class;
    double w = 1.0;
    if (config.scale_pos_weight) {
      w = *config.scale_pos_weight;
    } else if (counts[positive_class] > 0 && counts[positive_class] < targets.size()) {
      w = auto_pos_weight(y);
    }
    return gbdt::train_binary(q, y, config, w, derive_seed(config.random_state, stream));
  };

  if (task == Task::kLineBinary) {
    model.ensembles.push_back(fit(1, 0));
  } else {
    for (std::size_t k = 0; k < model.label_space.size(); ++k) {
      model.ensembles.push_back(fit(k, k));
    }
  }
  return model;
}

std::vector<double> predict_proba(const TrainedModel& model, std::span<const float> features) {
  if (features.size() != model.feature_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "model expects " + std::to_string(model.feature_dim) +
                                                   " features, got " +
                                                   std::to_string(features.size()));
  }
  std::vector<double> scores;
  scores.reserve(model.ensembles.size());
  for (const auto& e : model.ensembles) scores.push_back(e.predict_proba(features));
  return scores;
}

int predict_label(const TrainedModel& model, std::span<const float> features, double threshold) {
  auto scores = predict_proba(model, features);
  if (model.task == Task::kLineBinary) return scores[0] >= threshold ? 1 : 0;
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::string serialize_model(const TrainedModel& model) {
  json ensembles = json::array();
  for (const auto& e : model.ensembles) ensembles.push_back(gbdt::to_json(e));
  json j{{"format", kModelFormat},
         {"task", task_name(model.task)},
         {"label_space", model.label_space},
         {"config", gbdt::to_json(model.config)},
         {"feature_dim", model.feature_dim},
         {"feature_mode", feature_mode_name(model.feature_mode)},
         {"metadata",
          {{"dataset_sha256", model.metadata.dataset_sha256},
           {"split_seed", model.metadata.split_seed},
           {"backend_id", model.metadata.backend_id},
           {"train_rows", model.metadata.train_rows}}},
         {"ensembles", ensembles}};
  return j.dump() + "\n";
}

void save_model(const TrainedModel& model, const fs::path& path) {
  io::write_text(path, serialize_model(model));
}

TrainedModel load_model(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingArtifact, "model artifact not found: " + path.string());
  }
  auto j = io::read_json(path);
  if (j.value("format", "") != kModelFormat) {
    throw Error(ErrorCode::kFormat, path.string() + ": not a model artifact");
  }
  try {
    TrainedModel m;
    m.task = task_from_name(j.at("task").get<std::string>());
    m.label_space = j.at("label_space").get<std::vector<std::string>>();
    m.config = gbdt::config_from_json(j.at("config"));
    m.feature_dim = j.at("feature_dim").get<std::size_t>();
    m.feature_mode = feature_mode_from_name(j.at("feature_mode").get<std::string>());
    const auto& md = j.at("metadata");
    m.metadata.dataset_sha256 = md.at("dataset_sha256").get<std::string>();
    m.metadata.split_seed = md.at("split_seed").get<std::uint64_t>();
    m.metadata.backend_id = md.at("backend_id").get<std::string>();
    m.metadata.train_rows = md.at("train_rows").get<std::size_t>();
    for (const auto& e : j.at("ensembles")) m.ensembles.push_back(gbdt::booster_from_json(e));
    std::size_t expected = m.task == Task::kLineBinary ? 1 : m.label_space.size();
    if (m.ensembles.size() != expected) {
      throw Error(ErrorCode::kFormat, path.string() + ": ensemble count does not match label space");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

std::vector<float> module_features(const embed::EmbeddingStore& store, const std::string& design_id) {
  auto v = store.view(design_id, embed::VectorKind::kModule);
  return {v.begin(), v.end()};
}

std::vector<float> line_features(const embed::EmbeddingStore& store, const std::string& design_id,
                                 int line_no, LineFeatureMode mode) {
  auto line = store.view(design_id, embed::VectorKind::kLine, line_no);
  std::vector<float> out(line.begin(), line.end());
  if (mode == LineFeatureMode::kLineAndModule) {
    auto module = store.view(design_id, embed::VectorKind::kModule);
    out.insert(out.end(), module.begin(), module.end());
  }
  return out;
}

DesignPrediction predict_design(const TrainedModel& module_model, const TrainedModel& line_model,
                                const std::string& design_id, const embed::EmbeddingStore& store,
                                double threshold) {
  if (module_model.task != Task::kModuleMulticlass || line_model.task != Task::kLineBinary) {
    throw Error(ErrorCode::kInvalidArgument, "predict_design needs a module and a line model");
  }
  if (!store.contains(design_id, embed::VectorKind::kModule)) {
    throw Error(ErrorCode::kMissingEmbeddings, "no embeddings stored for design " + design_id);
  }
  DesignPrediction out;
  int label = predict_label(module_model, module_features(store, design_id));
  out.module_label = module_model.label_space[label];
  if (out.module_label == "NONE") return out;

  out.line_stage_ran = true;
  const auto n_lines = store.line_count(design_id);
  for (std::size_t i = 1; i <= n_lines; ++i) {
    auto feats = line_features(store, design_id, static_cast<int>(i), line_model.feature_mode);
    double s = predict_proba(line_model, feats)[0];
    out.line_scores.push_back(s);
    if (s >= threshold) out.buggy_lines.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace vericwety::classifier
