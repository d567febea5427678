// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vericwety::synth {

struct ClassShare {
  std::string label;
  double weight = 0.0;
};

/// Skewed default mix: two dominant classes, a sizeable clean share, a small
/// hardcoded-key class and a trojan class below 1%.
std::vector<ClassShare> default_class_mix();

struct SyntheticSpec {
  std::size_t designs = 400;
  std::uint64_t seed = 1;
  std::vector<ClassShare> mix = default_class_mix();
  int filler_min = 20;
  int filler_max = 50;
  /// Fraction of designs outside the debug-exposure class that carry a benign
  /// copy of its shared statement. Only module context tells them apart.
  double decoy_rate = 0.25;
  /// Designs (taken from the front) on which the three mock voters disagree.
  std::size_t disagreements = 0;
};

struct SyntheticDesign {
  std::string design_id;
  std::string label;
  std::string source;
  std::vector<int> buggy_lines;  // 1-based
};

std::vector<SyntheticDesign> generate(const SyntheticSpec& spec);

/// Per-class design counts by largest remainder over the mix weights.
std::vector<std::size_t> class_counts(const SyntheticSpec& spec);

/// Writes `corpus/<id>.v`, three mock fixtures, `providers.json`,
/// `gold.jsonl` (module labels) and a pipeline `config.json` under `dir`.
/// Returns the config path.
std::filesystem::path write_workspace(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace vericwety::synth
