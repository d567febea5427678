// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

// Writes a synthetic planted-pattern workspace (corpus, mock providers,
// gold labels, pipeline config) for offline end-to-end runs.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "vericwety/error.hpp"
#include "vericwety/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vericwety-synth: generate a synthetic labeled Verilog workspace"};
  vericwety::synth::SyntheticSpec spec;
  std::string out;
  app.add_option("--out", out, "workspace directory")->required();
  app.add_option("--designs", spec.designs, "number of designs")->check(CLI::Range(10, 100000));
  app.add_option("--seed", spec.seed, "generator seed");
  app.add_option("--decoy-rate", spec.decoy_rate, "share of designs carrying the benign shared statement")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--disagreements", spec.disagreements, "designs on which the mock voters disagree");
  CLI11_PARSE(app, argc, argv);
  // Logs go to stderr so stdout carries only command output.
  spdlog::set_default_logger(spdlog::stderr_color_mt("vericwety"));

  try {
    auto config = vericwety::synth::write_workspace(spec, out);
    auto counts = vericwety::synth::class_counts(spec);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      fmt::print("{:<10} {}\n", spec.mix[k].label, counts[k]);
    }
    fmt::print("config: {}\n", config.string());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
