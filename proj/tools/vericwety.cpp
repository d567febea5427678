// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per pipeline stage.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vericwety/error.hpp"
#include "vericwety/pipeline.hpp"
#include "vericwety/report.hpp"

namespace {

namespace pl = vericwety::pipeline;
using vericwety::ErrorCode;
using vericwety::classifier::Task;

int exit_code_for(const vericwety::Error& e) {
  switch (e.code()) {
    case ErrorCode::kMissingArtifact:
    case ErrorCode::kMissingEmbeddings:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vericwety: CWE labeling, embedding and classification for Verilog designs"};
  app.set_version_flag("--version", VERICWETY_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  pl::Overrides overrides;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  std::string backend;
  std::string out_dir;
  std::string task_name = "module";
  std::string design;
  std::string gold;
  bool verbose = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "pipeline configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the split and training seed");
    sub->add_option("--threshold", threshold, "line decision threshold")->check(CLI::Range(0.0, 1.01));
    sub->add_option("--backend", backend, "embedding backend")->check(CLI::IsMember({"fallback", "remote"}));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("-v,--verbose", verbose, "debug logging");
  };

  auto* label = app.add_subcommand("label", "query providers, vote, write label datasets");
  auto* embed = app.add_subcommand("embed", "embed modules and lines into the store (resumable)");
  auto* split = app.add_subcommand("split", "write the train/test design split");
  auto* train = app.add_subcommand("train", "train the module or line classifier");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a trained model on the test split");
  auto* predict = app.add_subcommand("predict", "two-stage prediction for one design");
  auto* agreement = app.add_subcommand("agreement", "per-provider agreement with gold labels");
  auto* report = app.add_subcommand("report", "render text tables and plots for evaluation reports");
  for (auto* sub : {label, embed, split, train, evaluate, predict, agreement, report}) common(sub);
  for (auto* sub : {train, evaluate}) {
    sub->add_option("--task", task_name, "module or line")->check(CLI::IsMember({"module", "line"}));
  }
  predict->add_option("--design", design, "design id")->required();
  agreement->add_option("--gold", gold, "gold module labels (JSONL)")->required();

  CLI11_PARSE(app, argc, argv);
  // Logs go to stderr so stdout carries only command output.
  spdlog::set_default_logger(spdlog::stderr_color_mt("vericwety"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--threshold")) overrides.threshold = threshold;
  if (sub->count("--backend")) overrides.backend = backend;
  if (sub->count("--out")) overrides.out_dir = out_dir;
  const Task task = task_name == "line" ? Task::kLineBinary : Task::kModuleMulticlass;

  try {
    auto config = pl::load_config(config_path);
    pl::apply(config, overrides);

    if (sub == label) {
      auto s = pl::cmd_label(config);
      fmt::print("labeled {} designs, UNRESOLVED: {}\n", s.designs, s.unresolved);
      for (const auto& [l, n] : s.histogram) fmt::print("  {:<20} {}\n", l, n);
    } else if (sub == embed) {
      auto s = pl::cmd_embed(config);
      fmt::print("embedded {} designs ({} vectors), {} already cached\n", s.designs_embedded,
                 s.vectors_written, s.designs_skipped);
    } else if (sub == split) {
      auto s = pl::cmd_split(config);
      fmt::print("train {} / test {} designs (seed {})\n", s.train.size(), s.test.size(), s.seed);
    } else if (sub == train) {
      auto m = pl::cmd_train(config, task);
      fmt::print("trained {} model on {} rows -> {}\n", task_name, m.metadata.train_rows,
                 pl::layout(config).model(task).string());
    } else if (sub == evaluate) {
      auto r = pl::cmd_evaluate(config, task);
      fmt::print("{}", vericwety::eval::text_table(r));
    } else if (sub == predict) {
      auto p = pl::cmd_predict(config, design);
      nlohmann::json j{{"design_id", p.design_id},
                       {"module_label", p.result.module_label},
                       {"buggy_lines", p.result.buggy_lines}};
      fmt::print("{}\n", j.dump());
    } else if (sub == agreement) {
      fmt::print("{}", pl::agreement_table(pl::cmd_agreement(config, gold)));
    } else if (sub == report) {
      for (const auto& p : pl::cmd_report(config)) fmt::print("{}\n", p.string());
    }
  } catch (const vericwety::Error& e) {
    spdlog::error("{}: {}", vericwety::error_code_name(e.code()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
