// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vericwety/corpus.hpp"

namespace vericwety::labeling {

/// A module-level CWE class. The taxonomy is run configuration; two values are
/// reserved: NONE (clean design) and UNRESOLVED (voters disagreed).
struct CweLabel {
  std::string value;

  static CweLabel none() { return {"NONE"}; }
  static CweLabel unresolved() { return {"UNRESOLVED"}; }
  bool is_none() const { return value == "NONE"; }
  bool is_unresolved() const { return value == "UNRESOLVED"; }

  auto operator<=>(const CweLabel&) const = default;
};

struct Taxonomy {
  std::string version;
  std::vector<CweLabel> labels;  // includes NONE

  bool contains(const CweLabel& label) const;
  /// Maps a provider's free-form label ("cwe-1244", "1244", "none") onto a
  /// taxonomy member, or nullopt when it is outside the taxonomy.
  std::optional<CweLabel> normalize(std::string_view raw) const;
  std::string joined(std::string_view sep = ", ") const;
};

Taxonomy taxonomy_v1();
Taxonomy taxonomy_v2();
/// "v1", "v2", or a comma-separated custom label list.
Taxonomy taxonomy_from_spec(std::string_view spec);

struct ProviderVerdict {
  std::string provider_id;
  std::string design_id;
  std::optional<CweLabel> module_label;  // nullopt = ABSTAIN
  std::vector<int> buggy_lines;          // sorted, unique, within [1, line_count]
  std::string raw_response;
  std::string failure;  // reason for an abstention caused by transport/parse errors

  bool abstained() const { return !module_label.has_value(); }
  bool operator==(const ProviderVerdict&) const = default;
};

struct VoteResult {
  std::string design_id;
  CweLabel final_label;
  std::vector<std::uint8_t> line_flags;  // index i-1 holds line i
  std::vector<ProviderVerdict> verdicts;
  std::map<std::string, int> tally;

  bool operator==(const VoteResult&) const = default;
};

/// Parses a provider reply of the form {"cwe": "<label>", "buggy_lines": [..]}
/// (also accepts "label"/"lines" keys and surrounding prose or code fences).
/// Out-of-taxonomy labels and unparseable replies yield an abstention with the
/// raw text preserved; out-of-range line numbers are dropped with a warning.
ProviderVerdict parse_reply(std::string_view raw, const Taxonomy& taxonomy, std::size_t line_count,
                            const std::string& provider_id, const std::string& design_id);

/// Votes needed to accept a label among n voters: ceil(n/2).
int vote_threshold(std::size_t n);

CweLabel vote_module(std::span<const ProviderVerdict> verdicts);
std::vector<std::uint8_t> vote_lines(std::span<const ProviderVerdict> verdicts,
                                     std::size_t line_count);
VoteResult vote(std::vector<ProviderVerdict> verdicts, std::size_t line_count);

struct ModuleLabel {
  std::string design_id;
  CweLabel label;
  bool operator==(const ModuleLabel&) const = default;
};

struct ModuleLabelSet {
  std::vector<ModuleLabel> entries;  // corpus order
  std::vector<std::string> excluded;  // UNRESOLVED designs

  std::optional<CweLabel> find(const std::string& design_id) const;
  std::map<std::string, std::size_t> histogram() const;
  bool operator==(const ModuleLabelSet&) const = default;
};

struct DesignLineLabels {
  std::string design_id;
  std::vector<std::uint8_t> labels;  // one per line, 0/1
  bool operator==(const DesignLineLabels&) const = default;
};

struct LineLabelSet {
  std::vector<DesignLineLabels> designs;

  std::size_t rows() const;
  std::size_t positives() const;
  bool operator==(const LineLabelSet&) const = default;
};

struct LabelDatasets {
  ModuleLabelSet modules;
  LineLabelSet lines;
};

LabelDatasets build_label_dataset(const std::vector<corpus::DesignUnit>& units,
                                  const std::vector<VoteResult>& votes);

struct AgreementRow {
  std::string provider_id;
  std::size_t total = 0;
  std::size_t mismatches = 0;
  double correct_pct = 0.0;
};

/// Per-provider comparison against gold labels; abstentions count as
/// mismatches. Providers are reported in first-seen order.
std::vector<AgreementRow> provider_agreement_report(std::span<const ProviderVerdict> verdicts,
                                                    const ModuleLabelSet& gold);

// On-disk formats (JSONL, one record per line).
void write_vote_log(const std::vector<VoteResult>& votes, const std::filesystem::path& path);
std::vector<VoteResult> read_vote_log(const std::filesystem::path& path);
void write_module_labels(const ModuleLabelSet& set, const std::filesystem::path& path);
ModuleLabelSet read_module_labels(const std::filesystem::path& path);
void write_line_labels(const LineLabelSet& set, const std::filesystem::path& path);
LineLabelSet read_line_labels(const std::filesystem::path& path);

}  // namespace vericwety::labeling
