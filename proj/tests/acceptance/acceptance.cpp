// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status is nonzero if any fails.
//
// usage: acceptance [work_dir]

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vericwety/classifier.hpp"
#include "vericwety/evaluation.hpp"
#include "vericwety/hashing.hpp"
#include "vericwety/labeling.hpp"
#include "vericwety/pipeline.hpp"
#include "vericwety/synthetic.hpp"

namespace fs = std::filesystem;
using namespace vericwety;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1: voting

labeling::ProviderVerdict verdict(const std::string& provider, const std::string& label) {
  labeling::ProviderVerdict v;
  v.provider_id = provider;
  v.design_id = "d";
  v.module_label = labeling::CweLabel{label};
  return v;
}

// Most frequent label if it is unique and has at least two votes.
std::string brute_force_majority(const std::vector<std::string>& votes) {
  std::map<std::string, int> counts;
  for (const auto& v : votes) ++counts[v];
  int best = 0;
  for (const auto& [l, n] : counts) best = std::max(best, n);
  std::vector<std::string> winners;
  for (const auto& [l, n] : counts) {
    if (n == best) winners.push_back(l);
  }
  return best >= 2 && winners.size() == 1 ? winners.front() : "UNRESOLVED";
}

Outcome voting_oracle() {
  const std::vector<std::string> taxonomy = {"CWE-1244", "CWE-1245", "CWE-321", "CWE-506", "NONE"};
  int checked = 0, matched = 0, unresolved = 0;
  for (const auto& a : taxonomy) {
    for (const auto& b : taxonomy) {
      for (const auto& c : taxonomy) {
        std::vector<labeling::ProviderVerdict> vs = {verdict("p1", a), verdict("p2", b), verdict("p3", c)};
        auto got = labeling::vote_module(vs).value;
        auto want = brute_force_majority({a, b, c});
        ++checked;
        matched += got == want;
        unresolved += want == "UNRESOLVED";
      }
    }
  }
  return {checked == 125 && matched == checked,
          fmt::format("{}/{} combinations match, {} ties -> UNRESOLVED", matched, checked, unresolved)};
}

// ------------------------------------------------------- 2: metric fixtures

Outcome metric_fixtures() {
  std::vector<std::string> failures;

  double f1 = eval::f1_score(0.886, 0.870);
  if (std::abs(f1 - 0.878) > 0.001) failures.push_back(fmt::format("F1 {:.4f}", f1));

  // Eight per-class precisions with their supports.
  const std::vector<std::pair<double, long long>> rows = {{0.886, 276}, {0.884, 213}, {0.556, 9},
                                                          {0.576, 50},  {0.333, 5},   {0.477, 26},
                                                          {0.0, 5},     {0.555, 120}};
  std::vector<eval::ClassMetrics> per_class;
  eval::ConfusionMatrix cm;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    per_class.push_back({fmt::format("c{}", i), rows[i].first, 0.0, 0.0, rows[i].second});
    cm.label_space.push_back(per_class.back().label);
  }
  cm.counts.assign(rows.size(), std::vector<long long>(rows.size(), 0));
  for (std::size_t i = 0; i < rows.size(); ++i) cm.counts[i][i] = rows[i].second;
  double weighted = eval::aggregate(per_class, cm).weighted.precision;
  if (std::abs(weighted - 0.777) > 0.005) failures.push_back(fmt::format("weighted P {:.4f}", weighted));

  std::vector<int> gold(1234, 1), pred(1234, 0);
  std::fill_n(pred.begin(), 791, 1);
  auto line_metrics = eval::class_metrics(eval::confusion_binary(gold, pred));
  double recall = line_metrics[1].recall;
  if (std::abs(recall - 0.641) > 0.001) failures.push_back(fmt::format("recall {:.4f}", recall));

  labeling::ModuleLabelSet truth;
  std::vector<labeling::ProviderVerdict> verdicts;
  for (int i = 0; i < 50; ++i) {
    auto id = fmt::format("d{}", i);
    truth.entries.push_back({id, {"CWE-1244"}});
    auto v = verdict("provider", i < 25 ? "CWE-1245" : "CWE-1244");
    v.design_id = id;
    verdicts.push_back(v);
  }
  auto agreement = labeling::provider_agreement_report(verdicts, truth).front();
  if (agreement.total != 50 || agreement.mismatches != 25 || std::abs(agreement.correct_pct - 50.0) > 1e-9) {
    failures.push_back(fmt::format("agreement {}/{}/{}", agreement.total, agreement.mismatches, agreement.correct_pct));
  }

  std::string detail = fmt::format("F1={:.4f} weightedP={:.4f} recall={:.4f} correct={:.0f}%", f1, weighted, recall,
                                   agreement.correct_pct);
  for (const auto& f : failures) detail += "; off: " + f;
  return {failures.empty(), detail};
}

// -------------------------------------------------- 3: metrics vs recount

Outcome metrics_oracle() {
  std::mt19937_64 rng(20260101);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 200);
    std::vector<std::string> space;
    for (int c = 0; c < k; ++c) space.push_back(fmt::format("L{}", c));
    std::vector<std::string> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = space[rng() % k];
      pred[i] = rng() % 3 == 0 ? gold[i] : space[rng() % k];
    }
    auto cm = eval::confusion(gold, pred, space);
    auto report = eval::make_report("t", cm);

    // Recount straight from the (gold, predicted) pairs.
    long long correct = 0;
    double macro_p = 0, macro_r = 0, macro_f = 0, w_p = 0, w_r = 0, w_f = 0, bal = 0;
    int supported = 0;
    for (int c = 0; c < k; ++c) {
      long long tp = 0, fp = 0, fn = 0;
      for (int i = 0; i < n; ++i) {
        bool g = gold[i] == space[c], p = pred[i] == space[c];
        tp += g && p;
        fp += !g && p;
        fn += g && !p;
      }
      double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
      double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
      double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
      const auto& m = report.per_class[c];
      if (m.precision != precision || m.recall != recall || m.f1 != f1 || m.support != tp + fn) ++mismatches;
      for (int j = 0; j < k; ++j) {
        long long cell = 0;
        for (int i = 0; i < n; ++i) cell += gold[i] == space[c] && pred[i] == space[j];
        if (cm.counts[c][j] != cell) ++mismatches;
      }
      macro_p += precision;
      macro_r += recall;
      macro_f += f1;
      w_p += precision * static_cast<double>(tp + fn);
      w_r += recall * static_cast<double>(tp + fn);
      w_f += f1 * static_cast<double>(tp + fn);
      if (tp + fn > 0) {
        bal += recall;
        ++supported;
      }
    }
    for (int i = 0; i < n; ++i) correct += gold[i] == pred[i];
    const auto& a = report.aggregates;
    const double dn = n, dk = k;
    bool ok = a.accuracy == static_cast<double>(correct) / dn && a.macro.precision == macro_p / dk &&
              a.macro.recall == macro_r / dk && a.macro.f1 == macro_f / dk && a.weighted.precision == w_p / dn &&
              a.weighted.recall == w_r / dn && a.weighted.f1 == w_f / dn &&
              a.balanced_accuracy == (supported ? bal / supported : 0.0);
    if (!ok) ++mismatches;
  }
  return {mismatches == 0, fmt::format("100 random instances, {} mismatching quantities", mismatches)};
}

// ------------------------------------------------------ 4: split properties

Outcome split_properties() {
  std::mt19937_64 rng(77);
  int size_violations = 0, determinism_violations = 0, leaks = 0, group_size_violations = 0;

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng() % 300;
    std::vector<classifier::SplitItem> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back({fmt::format("d{}", i), fmt::format("L{}", rng() % 6)});
    classifier::SplitSpec spec{0.8, rng(), classifier::SplitStrategy::kStratifiedByLabel};
    auto first = classifier::split_dataset(items, spec);
    auto target = static_cast<long long>(std::llround(0.8 * static_cast<double>(n)));
    if (std::llabs(static_cast<long long>(first.train.size()) - target) > 1) ++size_violations;
    for (int rerun = 0; rerun < 5; ++rerun) {
      auto again = classifier::split_dataset(items, spec);
      if (again.train != first.train || again.test != first.test) ++determinism_violations;
    }
  }

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t designs = 3 + rng() % 40;
    std::vector<classifier::SplitItem> rows;
    for (std::size_t d = 0; d < designs; ++d) {
      const std::size_t lines = 5 + rng() % 60;
      for (std::size_t l = 0; l < lines; ++l) rows.push_back({fmt::format("design{}", d), rng() % 20 ? "0" : "1"});
    }
    classifier::SplitSpec spec{0.8, rng(), classifier::SplitStrategy::kGroupByDesign};
    auto parts = classifier::split_dataset(rows, spec);
    std::set<std::string> train_groups, test_groups;
    for (auto i : parts.train) train_groups.insert(rows[i].group);
    for (auto i : parts.test) test_groups.insert(rows[i].group);
    for (const auto& g : train_groups) leaks += test_groups.count(g) > 0;
    auto target = static_cast<long long>(std::llround(0.8 * static_cast<double>(designs)));
    if (std::llabs(static_cast<long long>(train_groups.size()) - target) > 1) ++group_size_violations;
  }

  bool pass = size_violations == 0 && determinism_violations == 0 && leaks == 0 && group_size_violations == 0;
  return {pass, fmt::format("size violations {}, rerun differences {}, leaked designs {}, group size violations {}",
                            size_violations, determinism_violations, leaks, group_size_violations)};
}

// ------------------------------------------------------ 5: positive weight

Outcome positive_weight() {
  std::vector<std::uint8_t> labels(148500, 0);
  std::fill_n(labels.begin(), 6300, 1);
  double w = classifier::auto_pos_weight(labels);
  double rate = 100.0 * 6300.0 / static_cast<double>(labels.size());
  bool pass = std::abs(w - 22.57) <= 0.01 && std::abs(rate - 4.24) <= 0.05;
  return {pass, fmt::format("scale_pos_weight={:.4f}, positive rate={:.3f}%", w, rate)};
}

// ------------------------------------------------- 6/7: synthetic pipeline

struct RunResult {
  fs::path out;
  double seconds = 0.0;
  eval::EvaluationReport module_report;
  eval::EvaluationReport line_report;
  long long line_only_fp = 0;
};

RunResult run_pipeline(const fs::path& dir, bool with_line_only) {
  auto t0 = Clock::now();
  fs::remove_all(dir);
  synth::SyntheticSpec spec;
  spec.designs = 400;
  spec.seed = 11;
  auto config_path = synth::write_workspace(spec, dir);
  auto config = pipeline::load_config(config_path);
  pipeline::cmd_label(config);
  pipeline::cmd_embed(config);
  pipeline::cmd_split(config);
  pipeline::cmd_train(config, classifier::Task::kModuleMulticlass);
  pipeline::cmd_train(config, classifier::Task::kLineBinary);
  RunResult r;
  r.out = pipeline::layout(config).root;
  r.module_report = pipeline::cmd_evaluate(config, classifier::Task::kModuleMulticlass);
  r.line_report = pipeline::cmd_evaluate(config, classifier::Task::kLineBinary);
  pipeline::cmd_report(config);
  r.seconds = seconds_since(t0);

  if (with_line_only) {
    // Same data and settings with line embeddings alone.
    auto l = pipeline::layout(config);
    auto store = embed::EmbeddingStore::open(l.store());
    auto labels = labeling::read_line_labels(l.line_labels());
    auto split = pipeline::read_split(l.split());
    auto module_labels = labeling::read_module_labels(l.module_labels());
    auto keep = [&](const std::vector<std::string>& ids) {
      std::vector<std::string> out;
      for (const auto& id : ids) {
        if (module_labels.find(id)) out.push_back(id);
      }
      return out;
    };
    auto mode = classifier::LineFeatureMode::kLineOnly;
    auto train = pipeline::build_line_dataset(store, labels, keep(split.train), mode);
    auto test = pipeline::build_line_dataset(store, labels, keep(split.test), mode);
    auto model = classifier::train(train.features, train.targets, {"0", "1"},
                                   pipeline::gbdt_config(config, classifier::Task::kLineBinary),
                                   classifier::Task::kLineBinary);
    for (std::size_t i = 0; i < test.targets.size(); ++i) {
      int p = classifier::predict_label(model, test.features.row(i), config.threshold);
      r.line_only_fp += p == 1 && test.targets[i] == 0;
    }
  }
  return r;
}

Outcome synthetic_end_to_end(const RunResult& run) {
  const auto& mc = run.module_report.aggregates;
  const auto& lc = run.line_report.confusion.counts;  // rows gold (0,1), columns predicted
  const long long fp = lc[0][1];
  const double line_recall = run.line_report.per_class[1].recall;
  const bool fp_ok = static_cast<double>(fp) <= 1.05 * static_cast<double>(run.line_only_fp);
  bool pass = mc.accuracy >= 0.90 && line_recall >= 0.80 && fp_ok && run.seconds < 300.0;
  return {pass, fmt::format("module accuracy={:.3f}, line recall={:.3f}, FP line+module={} vs line-only={}, "
                            "pipeline {:.1f} s",
                            mc.accuracy, line_recall, fp, run.line_only_fp, run.seconds)};
}

std::vector<fs::path> deterministic_artifacts(const fs::path& out) {
  std::vector<fs::path> files = {"votes.jsonl", "module_labels.jsonl", "line_labels.jsonl",
                                 "store/index.json", "store/vectors.bin", "split.json",
                                 "models/module.model.json", "models/line.model.json"};
  for (const auto& e : fs::directory_iterator(out / "reports")) {
    files.push_back(fs::path("reports") / e.path().filename());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism(const RunResult& a, const RunResult& b) {
  auto files = deterministic_artifacts(a.out);
  std::vector<std::string> differing;
  for (const auto& f : files) {
    if (!fs::exists(b.out / f) || sha256_file(a.out / f) != sha256_file(b.out / f)) {
      differing.push_back(f.generic_string());
    }
  }
  std::string detail = fmt::format("{} artifacts compared, {} differ", files.size(), differing.size());
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty() && files.size() >= 9, detail};
}

// ------------------------------------------------ 8: threshold monotonicity

Outcome threshold_monotonicity() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto grid = eval::default_threshold_grid();
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores(1000);
    std::vector<int> gold(1000);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      gold[i] = i < 2 ? static_cast<int>(i) : (u(rng) < 0.3 ? 1 : 0);
      // Coarse scores so that grid points coincide with ties.
      scores[i] = trial % 2 ? std::round(u(rng) * 20.0) / 20.0 : u(rng);
    }
    auto rows = eval::threshold_sweep(scores, gold, grid);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      violations += rows[k].fp > rows[k - 1].fp;
      violations += rows[k].fn < rows[k - 1].fn;
    }
  }
  return {violations == 0,
          fmt::format("20 datasets x 1000 pairs over {} thresholds, {} violations", grid.size(), violations)};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "vericwety_acceptance";
  fs::create_directories(work);

  int failed = 0;
  auto report = [&](int id, const std::string& name, double limit_s, const std::function<Outcome()>& fn) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = seconds_since(t0);
    if (s >= limit_s) {
      o.pass = false;
      o.detail += fmt::format("; over the {:.0f} s budget", limit_s);
    }
    failed += !o.pass;
    fmt::print("{} [{}] {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, s);
    std::fflush(stdout);
  };

  report(1, "voting oracle", 1.0, voting_oracle);
  report(2, "metric fixtures", 1.0, metric_fixtures);
  report(3, "metrics oracle equivalence", 10.0, metrics_oracle);
  report(4, "split properties", 10.0, split_properties);
  report(5, "positive weight", 1.0, positive_weight);

  RunResult first, second;
  report(6, "synthetic end-to-end", 300.0, [&] {
    first = run_pipeline(work / "run_a", true);
    return synthetic_end_to_end(first);
  });
  report(7, "determinism", 600.0, [&] {
    if (first.out.empty()) return Outcome{false, "first run did not complete"};
    second = run_pipeline(work / "run_b", false);
    return determinism(first, second);
  });
  report(8, "threshold monotonicity", 10.0, threshold_monotonicity);

  fmt::print("{} of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
