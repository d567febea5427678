// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>

#include "vericwety/corpus.hpp"
#include "vericwety/io.hpp"
#include "vericwety/synthetic.hpp"

namespace fs = std::filesystem;
using namespace vericwety;
using namespace vericwety::synth;

TEST(ClassCounts, LargestRemainderOverDefaultMix) {
  SyntheticSpec spec;
  spec.designs = 400;
  EXPECT_EQ(class_counts(spec), (std::vector<std::size_t>{168, 124, 76, 30, 2}));
  spec.designs = 37;
  auto c = class_counts(spec);
  EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::size_t{0}), 37u);
}

TEST(Generate, DeterministicAndSeedSensitive) {
  SyntheticSpec spec;
  spec.designs = 50;
  auto a = generate(spec);
  auto b = generate(spec);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].source, b[i].source);
  spec.seed = 2;
  auto c = generate(spec);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i].source == c[i].source;
  EXPECT_LT(same, a.size());
}

TEST(Generate, CleanDesignsHaveNoBuggyLines) {
  SyntheticSpec spec;
  spec.designs = 100;
  for (const auto& d : generate(spec)) {
    if (d.label == "NONE") {
      EXPECT_TRUE(d.buggy_lines.empty()) << d.design_id;
    } else {
      EXPECT_FALSE(d.buggy_lines.empty()) << d.design_id;
    }
  }
}

TEST(WriteWorkspace, BuggyLinesPointAtLoadedCorpusLines) {
  auto dir = fs::temp_directory_path() / "vericwety_synth_ws";
  fs::remove_all(dir);
  SyntheticSpec spec;
  spec.designs = 60;
  auto config = write_workspace(spec, dir);
  EXPECT_TRUE(fs::exists(config));
  for (const char* f : {"providers.json", "fixture_a.json", "fixture_b.json", "fixture_c.json", "gold.jsonl"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  auto designs = generate(spec);
  auto units = corpus::load_corpus(dir / "corpus");
  ASSERT_EQ(units.size(), designs.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    ASSERT_EQ(units[i].design_id, designs[i].design_id);
    for (int line : designs[i].buggy_lines) {
      ASSERT_LE(static_cast<std::size_t>(line), units[i].line_count());
      const auto& text = units[i].lines[line - 1].text;
      EXPECT_FALSE(units[i].lines[line - 1].is_blank) << designs[i].design_id << ":" << line;
      EXPECT_EQ(text.find("//"), std::string::npos) << text;
    }
  }
}
