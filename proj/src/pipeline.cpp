// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>
#include <set>
#include <unordered_map>

#include "vericwety/error.hpp"
#include "vericwety/hashing.hpp"
#include "vericwety/io.hpp"
#include "vericwety/parallel.hpp"
#include "vericwety/providers.hpp"
#include "vericwety/report.hpp"

#ifndef VERICWETY_VERSION
#define VERICWETY_VERSION "dev"
#endif

namespace vericwety::pipeline {

using nlohmann::json;
using classifier::Task;

namespace {

constexpr const char* kSplitSchema = "vericwety-split/1";
constexpr const char* kManifestSchema = "vericwety-run/1";

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

void require(const fs::path& path, std::string_view what, std::string_view producer) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingArtifact,
                fmt::format("{} not found: {} (run `vericwety {}` first)", what, path.string(), producer));
  }
}

std::size_t worker_count(const PipelineConfig& c) { return c.workers ? c.workers : default_workers(); }

// Collects artifact hashes for one command and appends the run record.
class RunRecorder {
 public:
  RunRecorder(const PipelineConfig& config, std::string command)
      : config_(config), root_(layout(config).root), command_(std::move(command)), started_(utc_now()) {}

  void input(const fs::path& p) { add(inputs_, p); }
  void output(const fs::path& p) { add(outputs_, p); }
  void note(const std::string& key, json value) { extra_[key] = std::move(value); }

  void commit() {
    json record{{"schema", kManifestSchema},
                {"command", command_},
                {"tool_version", VERICWETY_VERSION},
                {"seed", config_.seed},
                {"started_at", started_},
                {"finished_at", utc_now()},
                {"config", config_.snapshot()},
                {"inputs", inputs_},
                {"outputs", outputs_}};
    if (!extra_.empty()) record["details"] = extra_;
    fs::create_directories(root_);
    std::ofstream out(layout(config_).run_manifest(), std::ios::app);
    out << record.dump() << "\n";
    if (!out) throw Error(ErrorCode::kIo, "cannot append to run manifest");
  }

 private:
  std::string name_of(const fs::path& p) const {
    auto rel = p.lexically_normal().lexically_relative(root_.lexically_normal());
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return p.generic_string();
  }

  void add(json& table, const fs::path& p) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) table[name_of(f)] = sha256_file(f);
    } else if (fs::exists(p)) {
      table[name_of(p)] = sha256_file(p);
    }
  }

  const PipelineConfig& config_;
  fs::path root_;
  std::string command_;
  std::string started_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  json extra_ = json::object();
};

std::string manifest_text(const corpus::CorpusManifest& m) {
  std::string out;
  for (const auto& e : m.entries) {
    out += json{{"design_id", e.design_id},
                {"origin_path", e.origin_path},
                {"line_count", e.line_count},
                {"sha256", e.sha256}}
               .dump() +
           "\n";
  }
  return out;
}

std::unique_ptr<embed::EmbeddingBackend> make_backend(const PipelineConfig& c) {
  if (c.embedding.backend == "fallback") {
    return std::make_unique<embed::FallbackBackend>(c.embedding.dimension, c.embedding.ngram);
  }
  if (c.embedding.backend == "remote") {
    if (!c.embedding.remote) {
      throw Error(ErrorCode::kInvalidArgument, "remote backend selected but embedding.remote is not configured");
    }
    return std::make_unique<embed::RemoteBackend>(*c.embedding.remote);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown embedding backend " + c.embedding.backend);
}

embed::EmbeddingStore open_store(const PipelineConfig& c) {
  auto dir = layout(c).store();
  require(dir / "index.json", "embedding store", "embed");
  return embed::EmbeddingStore::open(dir);
}

labeling::ModuleLabelSet read_labels(const Layout& l) {
  require(l.module_labels(), "module label set", "label");
  return labeling::read_module_labels(l.module_labels());
}

// Labels present in the data, in taxonomy order; unknown extras follow sorted.
std::vector<std::string> label_space_for(const PipelineConfig& c, const labeling::ModuleLabelSet& labels) {
  auto taxonomy = labeling::taxonomy_from_spec(c.taxonomy);
  auto hist = labels.histogram();
  std::vector<std::string> space;
  for (const auto& l : taxonomy.labels) {
    if (hist.count(l.value)) space.push_back(l.value);
  }
  for (const auto& [l, n] : hist) {
    if (std::find(space.begin(), space.end(), l) == space.end()) space.push_back(l);
  }
  return space;
}

void check_embedded(const embed::EmbeddingStore& store, const std::vector<std::string>& designs) {
  std::vector<std::string> missing;
  for (const auto& d : designs) {
    if (!store.contains(d, embed::VectorKind::kModule)) missing.push_back(d);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) list += (i ? ", " : "") + missing[i];
    throw Error(ErrorCode::kMissingEmbeddings,
                fmt::format("{} designs have no embeddings ({}{}); run `vericwety embed`", missing.size(),
                            list, missing.size() > 5 ? ", ..." : ""));
  }
}

std::vector<std::string> labeled_subset(const std::vector<std::string>& ids,
                                        const labeling::ModuleLabelSet& labels) {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    if (labels.find(id)) out.push_back(id);
  }
  return out;
}

classifier::FeatureMatrix module_matrix(const embed::EmbeddingStore& store,
                                        const std::vector<std::string>& designs) {
  classifier::FeatureMatrix x(designs.size(), store.dimension());
  for (std::size_t i = 0; i < designs.size(); ++i) {
    auto v = store.view(designs[i], embed::VectorKind::kModule);
    std::copy(v.begin(), v.end(), x.row(i).begin());
  }
  return x;
}

}  // namespace

json PipelineConfig::snapshot() const {
  json corpus_paths = json::array();
  for (const auto& p : corpus) corpus_paths.push_back(p.generic_string());
  json emb{{"backend", embedding.backend}, {"dimension", embedding.dimension}, {"ngram", embedding.ngram}};
  if (embedding.remote) {
    emb["remote"] = {{"backend_id", embedding.remote->backend_id},
                     {"endpoint", embedding.remote->endpoint},
                     {"dimension", embedding.remote->dimension},
                     {"api_key_env_var", embedding.remote->api_key_env_var},
                     {"timeout_s", embedding.remote->timeout_s}};
  }
  json j{{"corpus", corpus_paths},
         {"taxonomy", taxonomy},
         {"providers", providers.generic_string()},
         {"embedding", emb},
         {"split", {{"train_fraction", train_fraction}, {"seed", seed}}},
         {"gbdt", gbdt},
         {"module_gbdt", module_gbdt},
         {"line_gbdt", line_gbdt},
         {"line_features", classifier::feature_mode_name(line_features)},
         {"threshold", threshold},
         {"out_dir", out_dir.generic_string()},
         {"workers", workers}};
  if (prompt_template) j["prompt_template"] = prompt_template->generic_string();
  return j;
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  try {
    PipelineConfig c;
    const auto& corpus = j.at("corpus");
    if (corpus.is_string()) {
      c.corpus.push_back(resolve(base_dir, corpus.get<std::string>()));
    } else {
      for (const auto& p : corpus) c.corpus.push_back(resolve(base_dir, p.get<std::string>()));
    }
    if (c.corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "config lists no corpus paths");
    c.taxonomy = j.value("taxonomy", c.taxonomy);
    if (j.contains("providers")) c.providers = resolve(base_dir, j.at("providers").get<std::string>());
    if (j.contains("prompt_template")) {
      c.prompt_template = resolve(base_dir, j.at("prompt_template").get<std::string>());
    }
    if (auto e = j.find("embedding"); e != j.end()) {
      c.embedding.backend = e->value("backend", c.embedding.backend);
      c.embedding.dimension = e->value("dimension", c.embedding.dimension);
      c.embedding.ngram = e->value("ngram", c.embedding.ngram);
      if (e->contains("remote")) c.embedding.remote = embed::remote_config_from_json(e->at("remote"));
    }
    if (auto s = j.find("split"); s != j.end()) {
      c.train_fraction = s->value("train_fraction", c.train_fraction);
      c.seed = s->value("seed", c.seed);
    }
    c.gbdt = j.value("gbdt", json::object());
    c.module_gbdt = j.value("module_gbdt", json::object());
    c.line_gbdt = j.value("line_gbdt", json::object());
    if (j.contains("line_features")) {
      c.line_features = classifier::feature_mode_from_name(j.at("line_features").get<std::string>());
    }
    c.threshold = j.value("threshold", c.threshold);
    c.out_dir = resolve(base_dir, j.value("out_dir", std::string("out")));
    c.workers = j.value("workers", c.workers);
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "split.train_fraction must be in (0, 1)");
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed pipeline config: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& path) {
  require(path, "config file", "<command> --config");
  auto c = config_from_json(io::read_json(path), path.parent_path());
  c.config_path = path;
  return c;
}

void apply(PipelineConfig& c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.backend) c.embedding.backend = *o.backend;
  if (o.out_dir) c.out_dir = *o.out_dir;
}

fs::path Layout::model(Task task) const {
  return root / "models" / (task == Task::kModuleMulticlass ? "module.model.json" : "line.model.json");
}

Layout layout(const PipelineConfig& config) { return {config.out_dir}; }

gbdt::GbdtConfig gbdt_config(const PipelineConfig& c, Task task) {
  gbdt::GbdtConfig base;
  base.random_state = c.seed;
  auto cfg = gbdt::config_from_json(c.gbdt, base);
  cfg = gbdt::config_from_json(task == Task::kModuleMulticlass ? c.module_gbdt : c.line_gbdt, cfg);
  if (cfg.n_threads == 0) cfg.n_threads = static_cast<int>(worker_count(c));
  return cfg;
}

std::vector<corpus::DesignUnit> load_units(const PipelineConfig& c) {
  std::vector<corpus::DesignUnit> units;
  std::set<std::string> seen;
  for (const auto& p : c.corpus) {
    require(p, "corpus path", "<command> with a valid corpus entry");
    for (auto& u : corpus::load_corpus(p)) {
      if (!seen.insert(u.design_id).second) {
        throw Error(ErrorCode::kDuplicateDesignId, "design id appears in two corpus paths: " + u.design_id);
      }
      units.push_back(std::move(u));
    }
  }
  return units;
}

LabelSummary cmd_label(const PipelineConfig& c) {
  RunRecorder rec(c, "label");
  const auto l = layout(c);
  require(c.providers, "provider config", "label with a `providers` entry");
  auto units = load_units(c);
  auto taxonomy = labeling::taxonomy_from_spec(c.taxonomy);
  auto tmpl = c.prompt_template ? labeling::load_prompt_template(*c.prompt_template)
                                : labeling::default_prompt_template();
  auto configs = labeling::load_provider_configs(c.providers);
  std::vector<std::unique_ptr<labeling::LabelProvider>> providers;
  for (const auto& pc : configs) providers.push_back(labeling::make_provider(pc));
  rec.input(c.providers);
  if (c.prompt_template) rec.input(*c.prompt_template);

  auto votes = labeling::label_corpus(providers, units, taxonomy, tmpl, worker_count(c));
  auto data = labeling::build_label_dataset(units, votes);

  io::write_text(l.corpus_manifest(), manifest_text(corpus::build_manifest(units)));
  labeling::write_vote_log(votes, l.votes());
  labeling::write_module_labels(data.modules, l.module_labels());
  labeling::write_line_labels(data.lines, l.line_labels());
  for (const auto& p : {l.corpus_manifest(), l.votes(), l.module_labels(), l.line_labels()}) rec.output(p);

  LabelSummary s{units.size(), data.modules.excluded.size(), data.modules.histogram()};
  rec.note("unresolved", s.unresolved);
  rec.note("prompt_version", tmpl.version);
  rec.commit();
  return s;
}

EmbedSummary cmd_embed(const PipelineConfig& c, const EmbedOptions& options) {
  RunRecorder rec(c, "embed");
  const auto l = layout(c);
  auto units = load_units(c);
  auto backend = make_backend(c);
  const auto& info = backend->info();
  auto store = embed::EmbeddingStore::open_or_create(l.store(), info.backend_id, info.dimension);
  io::write_text(l.corpus_manifest(), manifest_text(corpus::build_manifest(units)));
  rec.input(l.corpus_manifest());

  EmbedSummary summary;
  std::vector<const corpus::DesignUnit*> pending;
  for (const auto& u : units) {
    bool complete = store.contains(u.design_id, embed::VectorKind::kModule) &&
                    store.line_count(u.design_id) == u.lines.size();
    if (complete) {
      ++summary.designs_skipped;
    } else {
      pending.push_back(&u);
    }
  }
  if (options.max_designs && pending.size() > *options.max_designs) pending.resize(*options.max_designs);

  // Vectors are computed in parallel per chunk and committed in corpus order,
  // so the store layout does not depend on scheduling.
  struct Slot {
    bool done = false;
    std::vector<embed::EmbeddingVector> vectors;
    std::vector<std::string> hashes;
  };
  const std::size_t workers = worker_count(c);
  const std::size_t chunk = std::max<std::size_t>(16, workers * 4);
  for (std::size_t begin = 0; begin < pending.size(); begin += chunk) {
    const std::size_t end = std::min(pending.size(), begin + chunk);
    std::vector<Slot> slots(end - begin);
    std::exception_ptr failure;
    try {
      parallel_for(slots.size(), workers, [&](std::size_t k) {
        const auto& u = *pending[begin + k];
        Slot& s = slots[k];
        s.vectors.push_back(embed::embed_module(*backend, u));
        s.hashes.push_back(sha256_hex(u.source_text));
        for (auto& v : embed::embed_lines(*backend, u)) {
          s.hashes.push_back(sha256_hex(u.lines[static_cast<std::size_t>(v.line_no - 1)].text));
          s.vectors.push_back(std::move(v));
        }
        s.done = true;
      });
    } catch (...) {
      failure = std::current_exception();
    }
    for (auto& s : slots) {
      if (!s.done) break;
      for (std::size_t i = 0; i < s.vectors.size(); ++i) {
        const auto& v = s.vectors[i];
        if (store.contains(v.design_id, v.kind, v.line_no)) continue;
        store.write(v, s.hashes[i]);
        ++summary.vectors_written;
      }
      ++summary.designs_embedded;
    }
    store.flush();
    if (failure) {
      spdlog::error("embedding aborted after {} designs; the store keeps everything committed so far",
                    summary.designs_embedded);
      std::rethrow_exception(failure);
    }
  }

  rec.output(l.store());
  rec.note("designs_embedded", summary.designs_embedded);
  rec.note("designs_skipped", summary.designs_skipped);
  rec.note("backend_id", info.backend_id);
  rec.commit();
  return summary;
}

DesignSplit cmd_split(const PipelineConfig& c) {
  RunRecorder rec(c, "split");
  const auto l = layout(c);
  auto labels = read_labels(l);
  rec.input(l.module_labels());

  std::vector<classifier::SplitItem> items;
  for (const auto& e : labels.entries) items.push_back({e.design_id, e.label.value});
  auto parts = classifier::split_dataset(
      items, {c.train_fraction, c.seed, classifier::SplitStrategy::kStratifiedByLabel});

  DesignSplit s{c.seed, c.train_fraction, {}, {}};
  for (auto i : parts.train) s.train.push_back(items[i].group);
  for (auto i : parts.test) s.test.push_back(items[i].group);
  json j{{"schema", kSplitSchema},
         {"seed", s.seed},
         {"train_fraction", s.train_fraction},
         {"strategy", "stratified_by_label"},
         {"train", s.train},
         {"test", s.test}};
  io::write_text(l.split(), j.dump(1) + "\n");
  rec.output(l.split());
  rec.commit();
  return s;
}

DesignSplit read_split(const fs::path& path) {
  require(path, "split file", "split");
  auto j = io::read_json(path);
  if (j.value("schema", "") != kSplitSchema) throw Error(ErrorCode::kFormat, path.string() + ": not a split file");
  return {j.at("seed").get<std::uint64_t>(), j.at("train_fraction").get<double>(),
          j.at("train").get<std::vector<std::string>>(), j.at("test").get<std::vector<std::string>>()};
}

LineDataset build_line_dataset(const embed::EmbeddingStore& store, const labeling::LineLabelSet& labels,
                               const std::vector<std::string>& designs, classifier::LineFeatureMode mode) {
  std::unordered_map<std::string, const labeling::DesignLineLabels*> by_id;
  for (const auto& d : labels.designs) by_id.emplace(d.design_id, &d);
  const std::size_t d = store.dimension();
  const std::size_t cols = mode == classifier::LineFeatureMode::kLineAndModule ? 2 * d : d;

  std::size_t rows = 0;
  for (const auto& id : designs) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::kKeyMissing, "no line labels for design " + id);
    rows += it->second->labels.size();
  }
  LineDataset out;
  out.features = classifier::FeatureMatrix(rows, cols);
  out.targets.reserve(rows);
  out.design_ids.reserve(rows);
  std::size_t r = 0;
  for (const auto& id : designs) {
    const auto& lab = by_id.at(id)->labels;
    if (store.line_count(id) != lab.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  fmt::format("{}: {} labeled lines but {} stored line vectors", id, lab.size(), store.line_count(id)));
    }
    for (std::size_t i = 0; i < lab.size(); ++i, ++r) {
      auto feats = classifier::line_features(store, id, static_cast<int>(i + 1), mode);
      std::copy(feats.begin(), feats.end(), out.features.row(r).begin());
      out.targets.push_back(lab[i]);
      out.design_ids.push_back(id);
    }
  }
  return out;
}

classifier::TrainedModel cmd_train(const PipelineConfig& c, Task task) {
  RunRecorder rec(c, fmt::format("train --task {}", task == Task::kModuleMulticlass ? "module" : "line"));
  const auto l = layout(c);
  auto labels = read_labels(l);
  auto split = read_split(l.split());
  auto store = open_store(c);
  auto train_ids = labeled_subset(split.train, labels);
  check_embedded(store, train_ids);
  auto cfg = gbdt_config(c, task);

  classifier::TrainedModel model;
  if (task == Task::kModuleMulticlass) {
    auto space = label_space_for(c, labels);
    std::vector<int> targets;
    for (const auto& id : train_ids) {
      auto label = labels.find(id)->value;
      targets.push_back(static_cast<int>(std::find(space.begin(), space.end(), label) - space.begin()));
    }
    model = classifier::train(module_matrix(store, train_ids), targets, space, cfg, task);
    rec.input(l.module_labels());
  } else {
    require(l.line_labels(), "line label set", "label");
    auto line_labels = labeling::read_line_labels(l.line_labels());
    auto data = build_line_dataset(store, line_labels, train_ids, c.line_features);
    model = classifier::train(data.features, data.targets, {"0", "1"}, cfg, task);
    model.feature_mode = c.line_features;
    rec.input(l.line_labels());
  }
  model.metadata.backend_id = store.backend_id();
  model.metadata.split_seed = split.seed;
  classifier::save_model(model, l.model(task));

  rec.input(l.split());
  rec.input(l.store());
  rec.output(l.model(task));
  rec.commit();
  return model;
}

eval::EvaluationReport cmd_evaluate(const PipelineConfig& c, Task task) {
  const bool module_task = task == Task::kModuleMulticlass;
  RunRecorder rec(c, fmt::format("evaluate --task {}", module_task ? "module" : "line"));
  const auto l = layout(c);
  require(l.model(task), "model artifact", module_task ? "train --task module" : "train --task line");
  auto model = classifier::load_model(l.model(task));
  auto labels = read_labels(l);
  auto split = read_split(l.split());
  auto store = open_store(c);
  store.expect_backend(model.metadata.backend_id, store.dimension());
  auto test_ids = labeled_subset(split.test, labels);
  check_embedded(store, test_ids);

  eval::EvaluationReport report;
  if (module_task) {
    std::vector<std::string> gold, predicted;
    for (const auto& id : test_ids) {
      gold.push_back(labels.find(id)->value);
      auto feats = classifier::module_features(store, id);
      predicted.push_back(model.label_space[classifier::predict_label(model, feats)]);
    }
    report = eval::make_report("module", eval::confusion(gold, predicted, model.label_space));
  } else {
    auto line_labels = labeling::read_line_labels(l.line_labels());
    auto data = build_line_dataset(store, line_labels, test_ids, model.feature_mode);
    std::vector<double> scores(data.targets.size());
    std::vector<int> predicted(data.targets.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = classifier::predict_proba(model, data.features.row(i))[0];
      predicted[i] = scores[i] >= c.threshold ? 1 : 0;
    }
    report = eval::make_report(fmt::format("line ({})", classifier::feature_mode_name(model.feature_mode)),
                               eval::confusion_binary(data.targets, predicted));
    bool has_pos = std::count(data.targets.begin(), data.targets.end(), 1) > 0;
    bool has_neg = std::count(data.targets.begin(), data.targets.end(), 0) > 0;
    if (has_pos && has_neg) {
      auto grid = eval::default_threshold_grid();
      report.curves = eval::Curves{eval::pr_curve(scores, data.targets),
                                   eval::threshold_sweep(scores, data.targets, grid)};
    } else {
      spdlog::warn("line test set lacks one class; curves are omitted");
    }
  }

  auto paths = eval::render_report(report, l.reports(), module_task ? "module" : "line",
                                   {eval::ReportFormat::kJson, eval::ReportFormat::kText});
  rec.input(l.model(task));
  rec.input(l.split());
  rec.input(module_task ? l.module_labels() : l.line_labels());
  rec.input(l.store() / "index.json");
  rec.input(l.store() / "vectors.bin");
  for (const auto& p : paths) rec.output(p);
  rec.note("threshold", c.threshold);
  rec.commit();
  return report;
}

Prediction cmd_predict(const PipelineConfig& c, const std::string& design_id) {
  RunRecorder rec(c, "predict --design " + design_id);
  const auto l = layout(c);
  require(l.model(Task::kModuleMulticlass), "model artifact", "train --task module");
  require(l.model(Task::kLineBinary), "model artifact", "train --task line");
  auto module_model = classifier::load_model(l.model(Task::kModuleMulticlass));
  auto line_model = classifier::load_model(l.model(Task::kLineBinary));
  if (module_model.metadata.backend_id != line_model.metadata.backend_id) {
    throw Error(ErrorCode::kBackendMismatch, "module and line models were trained on different backends");
  }
  auto store = open_store(c);
  store.expect_backend(module_model.metadata.backend_id, store.dimension());
  Prediction p{design_id, classifier::predict_design(module_model, line_model, design_id, store, c.threshold)};
  rec.input(l.model(Task::kModuleMulticlass));
  rec.input(l.model(Task::kLineBinary));
  rec.input(l.store() / "index.json");
  rec.input(l.store() / "vectors.bin");
  rec.note("module_label", p.result.module_label);
  rec.note("buggy_lines", p.result.buggy_lines);
  rec.commit();
  return p;
}

std::vector<labeling::AgreementRow> cmd_agreement(const PipelineConfig& c, const fs::path& gold_path) {
  RunRecorder rec(c, "agreement");
  const auto l = layout(c);
  require(l.votes(), "vote log", "label");
  require(gold_path, "gold label file", "agreement --gold <file>");
  auto votes = labeling::read_vote_log(l.votes());
  auto gold = labeling::read_module_labels(gold_path);
  std::vector<labeling::ProviderVerdict> verdicts;
  for (const auto& v : votes) verdicts.insert(verdicts.end(), v.verdicts.begin(), v.verdicts.end());
  auto rows = labeling::provider_agreement_report(verdicts, gold);

  json j = json::array();
  for (const auto& r : rows) {
    j.push_back(json{{"provider_id", r.provider_id},
                     {"total", r.total},
                     {"mismatches", r.mismatches},
                     {"correct_pct", r.correct_pct}});
  }
  auto json_path = l.reports() / "agreement.json";
  auto text_path = l.reports() / "agreement.txt";
  io::write_text(json_path, json{{"schema", "vericwety-agreement/1"}, {"providers", j}}.dump(2) + "\n");
  io::write_text(text_path, agreement_table(rows));
  rec.input(l.votes());
  rec.input(gold_path);
  rec.output(json_path);
  rec.output(text_path);
  rec.commit();
  return rows;
}

std::string agreement_table(const std::vector<labeling::AgreementRow>& rows) {
  std::size_t width = 8;
  for (const auto& r : rows) width = std::max(width, r.provider_id.size());
  std::string out = fmt::format("{:<{}}  {:>13}  {:>10}  {:>8}\n", "Provider", width, "Total Samples",
                                "Mismatches", "Correct%");
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}  {:>13}  {:>10}  {:>8.0f}\n", r.provider_id, width, r.total, r.mismatches,
                       r.correct_pct);
  }
  return out;
}

std::vector<fs::path> cmd_report(const PipelineConfig& c) {
  RunRecorder rec(c, "report");
  const auto l = layout(c);
  std::vector<fs::path> written;
  for (const char* stem : {"module", "line"}) {
    auto path = l.reports() / (std::string(stem) + ".json");
    if (!fs::exists(path)) continue;
    auto report = eval::report_from_json(io::read_json(path));
    rec.input(path);
    for (auto& p : eval::render_report(report, l.reports(), stem,
                                       {eval::ReportFormat::kText, eval::ReportFormat::kPlots})) {
      if (p != path) {
        rec.output(p);
        written.push_back(std::move(p));
      }
    }
  }
  if (written.empty()) {
    throw Error(ErrorCode::kMissingArtifact,
                "no evaluation reports under " + l.reports().string() + " (run `vericwety evaluate` first)");
  }
  rec.commit();
  return written;
}

}  // namespace vericwety::pipeline
