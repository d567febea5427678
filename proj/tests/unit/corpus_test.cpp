// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "vericwety/corpus.hpp"
#include "vericwety/error.hpp"
#include "vericwety/io.hpp"

namespace fs = std::filesystem;
using namespace vericwety;
using namespace vericwety::corpus;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("vericwety_corpus_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(SegmentText, TwoCodeLines) {
  auto lines = segment_text("module m;\nendmodule");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].line_no, 1);
  EXPECT_EQ(lines[1].line_no, 2);
  for (const auto& l : lines) {
    EXPECT_FALSE(l.is_blank);
    EXPECT_FALSE(l.is_comment_only);
  }
}

TEST(SegmentText, CommentOnlyThenCode) {
  auto lines = segment_text("  // key below\nassign k=8'hFF;");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_TRUE(lines[0].is_comment_only);
  EXPECT_FALSE(lines[1].is_comment_only);
  EXPECT_EQ(lines[0].text, "  // key below");
}

TEST(SegmentText, BlockCommentSpansLines) {
  auto lines = segment_text("/* start\n   middle\n end */\nwire w; /* tail */\n   \n");
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_TRUE(lines[0].is_comment_only);
  EXPECT_TRUE(lines[1].is_comment_only);
  EXPECT_TRUE(lines[2].is_comment_only);
  EXPECT_FALSE(lines[3].is_comment_only);
  EXPECT_TRUE(lines[4].is_blank);
  EXPECT_FALSE(lines[4].is_comment_only);
  EXPECT_TRUE(lines[5].is_blank);
}

TEST(SegmentText, CommentMarkerInsideStringIsCode) {
  auto lines = segment_text("$display(\"// not a comment\");");
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_FALSE(lines[0].is_comment_only);
}

TEST(SegmentText, RoundTripOnRandomText) {
  std::mt19937 rng(3);
  const std::string alphabet = "ab /*\n\t;\"";
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    int len = static_cast<int>(rng() % 80);
    for (int i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    auto lines = segment_text(text);
    EXPECT_EQ(join_lines(lines), text);
    for (std::size_t i = 0; i < lines.size(); ++i) EXPECT_EQ(lines[i].line_no, static_cast<int>(i + 1));
  }
}

TEST(FindModuleRegions, IgnoresKeywordsInCommentsAndStrings) {
  std::string text =
      "// module fake;\n"
      "module real_one (input a);\n"
      "  initial $display(\"endmodule\");\n"
      "  /* endmodule */\n"
      "endmodule\n";
  auto regions = find_module_regions(text);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].module_name, "real_one");
  EXPECT_TRUE(regions[0].terminated);
  auto body = text.substr(regions[0].begin, regions[0].end - regions[0].begin);
  EXPECT_EQ(body.rfind("module real_one", 0), 0u);
  EXPECT_NE(body.find("endmodule"), std::string::npos);
}

TEST(FindModuleRegions, UnterminatedRunsToEnd) {
  std::string text = "module a;\n  wire w;\n";
  auto regions = find_module_regions(text);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_FALSE(regions[0].terminated);
  // Regions stop at the end of their last line, before the newline.
  EXPECT_EQ(regions[0].end, text.size() - 1);
}

TEST(FindModuleRegions, IdentifiersContainingKeywordAreNotModules) {
  auto regions = find_module_regions("wire module_en;\nmodule m;\nendmodule\n");
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].module_name, "m");
}

TEST(UnitsFromText, TwoModulesGetNumberedIds) {
  std::string text = "module a;\n  wire x;\nendmodule\n\nmodule b;\nendmodule\n";
  auto units = units_from_text(text, "f", "f.v");
  ASSERT_EQ(units.size(), 2u);
  EXPECT_EQ(units[0].design_id, "f#1");
  EXPECT_EQ(units[1].design_id, "f#2");
  EXPECT_EQ(units[0].module_name, "a");
  EXPECT_EQ(units[1].module_name, "b");
  EXPECT_EQ(units[0].lines.front().text, "module a;");
  EXPECT_EQ(units[1].lines.front().text, "module b;");
  for (const auto& u : units) EXPECT_EQ(join_lines(u.lines), u.source_text);
}

TEST(UnitsFromText, ThreeLineModule) {
  auto units = units_from_text("module m;\n  wire w;\nendmodule", "m", "m.v");
  ASSERT_EQ(units.size(), 1u);
  EXPECT_EQ(units[0].design_id, "m");
  ASSERT_EQ(units[0].line_count(), 3u);
  EXPECT_EQ(units[0].lines[2].line_no, 3);
}

TEST(LoadCorpus, DirectoryWithMultiModuleFileAndEmptyFile) {
  auto dir = scratch("dir");
  io::write_text(dir / "f.v", "module a;\nendmodule\nmodule b;\nendmodule\n");
  io::write_text(dir / "empty.v", "");
  io::write_text(dir / "notes.txt", "module ignored;\nendmodule\n");
  io::write_text(dir / "sub" / "g.sv", "module g;\nendmodule\n");
  auto units = load_corpus(dir);
  ASSERT_EQ(units.size(), 3u);
  EXPECT_EQ(units[0].design_id, "f#1");
  EXPECT_EQ(units[1].design_id, "f#2");
  EXPECT_EQ(units[2].design_id, "sub/g");
  EXPECT_EQ(units[2].origin_path, "sub/g.sv");
}

TEST(LoadCorpus, EmptyDirectoryIsAnError) {
  auto dir = scratch("empty");
  io::write_text(dir / "blank.v", "");
  EXPECT_EQ(code_of([&] { load_corpus(dir); }), ErrorCode::kEmptyCorpus);
}

TEST(LoadCorpus, DeterministicManifest) {
  auto dir = scratch("det");
  for (int i = 0; i < 5; ++i) {
    io::write_text(dir / ("m" + std::to_string(i) + ".v"),
                   "module m" + std::to_string(i) + ";\n  // c\n\nendmodule\n");
  }
  auto a = build_manifest(load_corpus(dir));
  auto b = build_manifest(load_corpus(dir));
  EXPECT_EQ(a, b);
  auto units = load_corpus(dir);
  std::size_t loc = 0;
  for (const auto& e : a.entries) loc += e.line_count;
  EXPECT_EQ(loc, corpus_stats(units).total_loc);
}

TEST(LoadCorpus, ManifestRoundTripAndChecksumMismatch) {
  auto dir = scratch("manifest");
  io::write_text(dir / "src" / "x.v", "module x;\nendmodule\n");
  io::write_text(dir / "src" / "y.v", "module y1;\nendmodule\nmodule y2;\nendmodule\n");
  auto units = load_corpus(dir / "src");
  auto manifest = build_manifest(units);
  // Manifest origin paths are relative to the corpus root; place the manifest there.
  write_manifest(manifest, dir / "src" / "corpus.jsonl");
  EXPECT_EQ(read_manifest(dir / "src" / "corpus.jsonl"), manifest);
  auto reloaded = load_corpus(dir / "src" / "corpus.jsonl");
  ASSERT_EQ(reloaded.size(), units.size());
  for (std::size_t i = 0; i < units.size(); ++i) EXPECT_EQ(reloaded[i].source_text, units[i].source_text);

  io::write_text(dir / "src" / "x.v", "module x;\n  wire changed;\nendmodule\n");
  EXPECT_EQ(code_of([&] { load_corpus(dir / "src" / "corpus.jsonl"); }), ErrorCode::kChecksumMismatch);
}

TEST(LoadCorpus, MissingPath) {
  EXPECT_EQ(code_of([] { load_corpus("/nonexistent/vericwety"); }), ErrorCode::kIo);
}

TEST(SanitizeUtf8, ReplacesInvalidBytes) {
  std::string text = "ok \xff\xfe end \xc3\xa9";
  EXPECT_EQ(sanitize_utf8(text), 2u);
  EXPECT_EQ(text, "ok \xEF\xBF\xBD\xEF\xBF\xBD end \xc3\xa9");
  std::string valid = "caf\xc3\xa9";
  EXPECT_EQ(sanitize_utf8(valid), 0u);
}

TEST(CorpusStats, CountsBlankAndCommentLines) {
  auto units = units_from_text("module m;\n\n  // c\nendmodule", "m", "m.v");
  auto s = corpus_stats(units);
  EXPECT_EQ(s.designs, 1u);
  EXPECT_EQ(s.total_loc, 4u);
  EXPECT_EQ(s.blank_lines, 1u);
  EXPECT_EQ(s.comment_only_lines, 1u);
}
