// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vericwety::corpus {

struct SourceLine {
  int line_no = 0;  // 1-based
  std::string text;  // no trailing newline
  bool is_blank = false;
  bool is_comment_only = false;

  bool operator==(const SourceLine&) const = default;
};

/// One `module ... endmodule` region of a Verilog source file.
struct DesignUnit {
  std::string design_id;
  std::string module_name;
  std::string source_text;
  std::vector<SourceLine> lines;
  std::string origin_path;

  std::size_t line_count() const { return lines.size(); }
};

struct ManifestEntry {
  std::string design_id;
  std::string origin_path;
  std::size_t line_count = 0;
  std::string sha256;

  bool operator==(const ManifestEntry&) const = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  bool operator==(const CorpusManifest&) const = default;
};

struct CorpusStats {
  std::size_t designs = 0;
  std::size_t total_loc = 0;
  std::size_t blank_lines = 0;
  std::size_t comment_only_lines = 0;
};

/// Splits text on '\n' and classifies each line. Block-comment state carries
/// across lines, so the continuation lines of a `/* ... */` block are marked
/// comment-only.
std::vector<SourceLine> segment_text(std::string_view text);
std::vector<SourceLine> segment_lines(const DesignUnit& unit);

/// Byte ranges [begin, end) of each top-level module region in a file.
/// Keywords inside comments and string literals are ignored; the first
/// `endmodule` closes the open `module`.
struct ModuleRegion {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string module_name;
  bool terminated = true;
};
std::vector<ModuleRegion> find_module_regions(std::string_view text);

/// Splits one file's contents into design units. `stem` is the id prefix;
/// a single module gets `stem`, several get `stem#1`, `stem#2`, ...
std::vector<DesignUnit> units_from_text(std::string_view text, const std::string& stem,
                                        const std::string& origin_path);

/// Loads a directory (recursively, `.v`/`.sv` only), a single source file, or
/// a JSONL manifest. Throws EmptyCorpus when nothing is found.
std::vector<DesignUnit> load_corpus(const std::filesystem::path& root);

/// Replaces invalid UTF-8 sequences with U+FFFD. Returns the number of
/// replacements made.
std::size_t sanitize_utf8(std::string& text);

std::string join_lines(const std::vector<SourceLine>& lines);

CorpusManifest build_manifest(const std::vector<DesignUnit>& units);
CorpusStats corpus_stats(const std::vector<DesignUnit>& units);
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

}  // namespace vericwety::corpus
