// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/labeling.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "vericwety/error.hpp"
#include "vericwety/io.hpp"

namespace vericwety::labeling {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Taxonomy make_taxonomy(std::string version, std::initializer_list<const char*> names) {
  Taxonomy t{std::move(version), {}};
  for (const char* n : names) t.labels.push_back({n});
  return t;
}

// Locates the outermost JSON object in a reply that may carry prose or code
// fences around it.
std::optional<json> extract_object(std::string_view raw) {
  auto parsed = json::parse(raw, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  auto open = raw.find('{');
  auto close = raw.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  parsed = json::parse(raw.substr(open, close - open + 1), nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  return std::nullopt;
}

const json* find_key(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = obj.find(k);
    if (it != obj.end()) return &*it;
  }
  return nullptr;
}

void check_same_design(std::span<const ProviderVerdict> verdicts) {
  if (verdicts.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "majority vote needs at least 3 verdicts, got " + std::to_string(verdicts.size()));
  }
  for (const auto& v : verdicts) {
    if (v.design_id != verdicts.front().design_id) {
      throw Error(ErrorCode::kMixedDesign,
                  "verdicts reference " + verdicts.front().design_id + " and " + v.design_id);
    }
  }
}

std::string flags_to_string(const std::vector<std::uint8_t>& flags) {
  std::string s(flags.size(), '0');
  for (std::size_t i = 0; i < flags.size(); ++i) s[i] = flags[i] ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> flags_from_string(const std::string& s) {
  std::vector<std::uint8_t> flags(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw Error(ErrorCode::kFormat, "bad flag string");
    flags[i] = s[i] == '1';
  }
  return flags;
}

json verdict_to_json(const ProviderVerdict& v) {
  return json{{"provider_id", v.provider_id},
              {"design_id", v.design_id},
              {"module_label", v.module_label ? json(v.module_label->value) : json(nullptr)},
              {"buggy_lines", v.buggy_lines},
              {"raw_response", v.raw_response},
              {"failure", v.failure}};
}

ProviderVerdict verdict_from_json(const json& j) {
  ProviderVerdict v;
  v.provider_id = j.at("provider_id").get<std::string>();
  v.design_id = j.at("design_id").get<std::string>();
  if (!j.at("module_label").is_null()) v.module_label = CweLabel{j.at("module_label").get<std::string>()};
  v.buggy_lines = j.at("buggy_lines").get<std::vector<int>>();
  v.raw_response = j.at("raw_response").get<std::string>();
  v.failure = j.value("failure", "");
  return v;
}

}  // namespace

bool Taxonomy::contains(const CweLabel& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::optional<CweLabel> Taxonomy::normalize(std::string_view raw) const {
  std::string s = upper(trim(raw));
  if (s.empty() || s == "NONE" || s == "NULL" || s == "NO CWE" || s == "N/A") {
    return contains(CweLabel::none()) ? std::optional(CweLabel::none()) : std::nullopt;
  }
  if (all_digits(s)) {
    s = "CWE-" + s;
  } else if (s.rfind("CWE", 0) == 0 && s.size() > 3 && (s[3] == '_' || s[3] == ' ' ||
                                                         std::isdigit(static_cast<unsigned char>(s[3])))) {
    s = "CWE-" + trim(s.substr(s[3] == '_' || s[3] == ' ' ? 4 : 3));
  }
  CweLabel label{s};
  if (contains(label)) return label;
  return std::nullopt;
}

std::string Taxonomy::joined(std::string_view sep) const {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += sep;
    out += labels[i].value;
  }
  return out;
}

Taxonomy taxonomy_v1() {
  return make_taxonomy("v1", {"CWE-250", "CWE-269", "CWE-284", "CWE-310", "CWE-321", "CWE-506",
                              "CWE-1198", "CWE-1244", "CWE-1245", "CWE-1260", "CWE-1271", "NONE"});
}

Taxonomy taxonomy_v2() {
  return make_taxonomy("v2", {"CWE-1244", "CWE-1245", "NONE", "CWE-310-AES-LEAK", "CWE-321",
                              "CWE-1271", "CWE-310-AES-DOS", "CWE-310-CSR-UNAUTH", "CWE-1260",
                              "CWE-506", "CWE-1198"});
}

Taxonomy taxonomy_from_spec(std::string_view spec) {
  if (spec == "v1") return taxonomy_v1();
  if (spec == "v2") return taxonomy_v2();
  Taxonomy t{"custom", {}};
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    auto item = upper(trim(spec.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                               : comma - start)));
    if (!item.empty()) {
      CweLabel label{item};
      if (label.is_unresolved()) {
        throw Error(ErrorCode::kInvalidArgument, "UNRESOLVED is reserved and cannot be a class");
      }
      if (!t.contains(label)) t.labels.push_back(label);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!t.contains(CweLabel::none())) t.labels.push_back(CweLabel::none());
  if (t.labels.size() < 2) throw Error(ErrorCode::kInvalidArgument, "taxonomy needs at least one CWE");
  return t;
}

ProviderVerdict parse_reply(std::string_view raw, const Taxonomy& taxonomy, std::size_t line_count,
                            const std::string& provider_id, const std::string& design_id) {
  ProviderVerdict v;
  v.provider_id = provider_id;
  v.design_id = design_id;
  v.raw_response = std::string(raw);

  auto obj = extract_object(raw);
  if (!obj) {
    v.failure = "MalformedResponse: no JSON object in reply";
    return v;
  }
  const json* label = find_key(*obj, {"cwe", "label", "CWE"});
  if (!label || !(label->is_string() || label->is_null() || label->is_number_integer())) {
    v.failure = "MalformedResponse: missing or non-string label";
    return v;
  }
  std::string label_text = label->is_string()          ? label->get<std::string>()
                           : label->is_number_integer() ? std::to_string(label->get<long long>())
                                                        : std::string();

  std::set<int> lines;
  if (const json* arr = find_key(*obj, {"buggy_lines", "lines"}); arr && !arr->is_null()) {
    if (!arr->is_array()) {
      v.failure = "MalformedResponse: buggy_lines is not an array";
      return v;
    }
    for (const auto& e : *arr) {
      if (!e.is_number_integer()) {
        v.failure = "MalformedResponse: non-integer line number";
        return v;
      }
      auto n = e.get<long long>();
      if (n < 1 || n > static_cast<long long>(line_count)) {
        spdlog::warn("{}/{}: dropping out-of-range line {} (design has {} lines)", provider_id,
                     design_id, n, line_count);
        continue;
      }
      lines.insert(static_cast<int>(n));
    }
  }

  auto normalized = taxonomy.normalize(label_text);
  if (!normalized) {
    v.failure = "OutOfTaxonomy: " + label_text;
    return v;
  }
  v.module_label = *normalized;
  v.buggy_lines.assign(lines.begin(), lines.end());
  return v;
}

int vote_threshold(std::size_t n) { return static_cast<int>((n + 1) / 2); }

CweLabel vote_module(std::span<const ProviderVerdict> verdicts) {
  check_same_design(verdicts);
  std::map<CweLabel, int> tally;
  for (const auto& v : verdicts) {
    if (v.module_label) ++tally[*v.module_label];
  }
  int best = 0;
  int holders = 0;
  const CweLabel* winner = nullptr;
  for (const auto& [label, count] : tally) {
    if (count > best) {
      best = count;
      holders = 1;
      winner = &label;
    } else if (count == best) {
      ++holders;
    }
  }
  if (!winner || holders > 1 || best < vote_threshold(verdicts.size())) return CweLabel::unresolved();
  return *winner;
}

std::vector<std::uint8_t> vote_lines(std::span<const ProviderVerdict> verdicts,
                                     std::size_t line_count) {
  auto module = vote_module(verdicts);
  std::vector<std::uint8_t> flags(line_count, 0);
  if (module.is_none() || module.is_unresolved()) return flags;
  std::vector<int> counts(line_count, 0);
  for (const auto& v : verdicts) {
    for (int line : v.buggy_lines) {
      if (line >= 1 && static_cast<std::size_t>(line) <= line_count) ++counts[line - 1];
    }
  }
  const int need = vote_threshold(verdicts.size());
  for (std::size_t i = 0; i < line_count; ++i) flags[i] = counts[i] >= need;
  return flags;
}

VoteResult vote(std::vector<ProviderVerdict> verdicts, std::size_t line_count) {
  VoteResult r;
  r.final_label = vote_module(verdicts);
  r.line_flags = vote_lines(verdicts, line_count);
  r.design_id = verdicts.front().design_id;
  for (const auto& v : verdicts) {
    if (v.module_label) ++r.tally[v.module_label->value];
  }
  r.verdicts = std::move(verdicts);
  return r;
}

std::optional<CweLabel> ModuleLabelSet::find(const std::string& design_id) const {
  for (const auto& e : entries) {
    if (e.design_id == design_id) return e.label;
  }
  return std::nullopt;
}

std::map<std::string, std::size_t> ModuleLabelSet::histogram() const {
  std::map<std::string, std::size_t> h;
  for (const auto& e : entries) ++h[e.label.value];
  return h;
}

std::size_t LineLabelSet::rows() const {
  std::size_t n = 0;
  for (const auto& d : designs) n += d.labels.size();
  return n;
}

std::size_t LineLabelSet::positives() const {
  std::size_t n = 0;
  for (const auto& d : designs) n += std::count(d.labels.begin(), d.labels.end(), 1);
  return n;
}

LabelDatasets build_label_dataset(const std::vector<corpus::DesignUnit>& units,
                                  const std::vector<VoteResult>& votes) {
  std::unordered_map<std::string, const VoteResult*> by_id;
  for (const auto& v : votes) by_id[v.design_id] = &v;

  std::vector<std::string> missing;
  for (const auto& u : units) {
    if (!by_id.count(u.design_id)) missing.push_back(u.design_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::kMissingVotes, "no vote result for: " + list);
  }

  LabelDatasets out;
  for (const auto& u : units) {
    const auto& v = *by_id.at(u.design_id);
    if (v.final_label.is_unresolved()) {
      out.modules.excluded.push_back(u.design_id);
      continue;
    }
    if (v.line_flags.size() != u.line_count()) {
      throw Error(ErrorCode::kLengthMismatch, u.design_id + ": vote has " +
                                                  std::to_string(v.line_flags.size()) +
                                                  " line flags for " +
                                                  std::to_string(u.line_count()) + " lines");
    }
    out.modules.entries.push_back({u.design_id, v.final_label});
    out.lines.designs.push_back({u.design_id, v.line_flags});
  }
  return out;
}

std::vector<AgreementRow> provider_agreement_report(std::span<const ProviderVerdict> verdicts,
                                                    const ModuleLabelSet& gold) {
  std::unordered_map<std::string, CweLabel> gold_by_id;
  for (const auto& e : gold.entries) gold_by_id.emplace(e.design_id, e.label);

  std::vector<AgreementRow> rows;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& v : verdicts) {
    auto g = gold_by_id.find(v.design_id);
    if (g == gold_by_id.end()) {
      throw Error(ErrorCode::kMissingVotes, "no gold label for design " + v.design_id);
    }
    auto [it, inserted] = row_of.emplace(v.provider_id, rows.size());
    if (inserted) rows.push_back({v.provider_id, 0, 0, 0.0});
    auto& row = rows[it->second];
    ++row.total;
    if (!v.module_label || *v.module_label != g->second) ++row.mismatches;
  }
  for (auto& row : rows) {
    row.correct_pct = row.total == 0 ? 0.0
                                     : 100.0 * (1.0 - static_cast<double>(row.mismatches) /
                                                          static_cast<double>(row.total));
  }
  return rows;
}

void write_vote_log(const std::vector<VoteResult>& votes, const std::filesystem::path& path) {
  std::string out;
  for (const auto& v : votes) {
    json verdicts = json::array();
    for (const auto& pv : v.verdicts) verdicts.push_back(verdict_to_json(pv));
    json j{{"design_id", v.design_id},
           {"final_label", v.final_label.value},
           {"line_flags", flags_to_string(v.line_flags)},
           {"tally", v.tally},
           {"verdicts", verdicts}};
    out += j.dump();
    out += '\n';
  }
  io::write_text(path, out);
}

std::vector<VoteResult> read_vote_log(const std::filesystem::path& path) {
  std::vector<VoteResult> votes;
  io::for_each_jsonl(path, [&](const json& j) {
    VoteResult v;
    v.design_id = j.at("design_id").get<std::string>();
    v.final_label = CweLabel{j.at("final_label").get<std::string>()};
    v.line_flags = flags_from_string(j.at("line_flags").get<std::string>());
    v.tally = j.at("tally").get<std::map<std::string, int>>();
    for (const auto& pv : j.at("verdicts")) v.verdicts.push_back(verdict_from_json(pv));
    votes.push_back(std::move(v));
  });
  return votes;
}

void write_module_labels(const ModuleLabelSet& set, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : set.entries) {
    out += json{{"design_id", e.design_id}, {"label", e.label.value}}.dump();
    out += '\n';
  }
  for (const auto& id : set.excluded) {
    out += json{{"design_id", id}, {"excluded", "UNRESOLVED"}}.dump();
    out += '\n';
  }
  io::write_text(path, out);
}

ModuleLabelSet read_module_labels(const std::filesystem::path& path) {
  ModuleLabelSet set;
  io::for_each_jsonl(path, [&](const json& j) {
    if (j.contains("excluded")) {
      set.excluded.push_back(j.at("design_id").get<std::string>());
      return;
    }
    CweLabel label{j.at("label").get<std::string>()};
    if (label.is_unresolved()) {
      throw Error(ErrorCode::kFormat, "UNRESOLVED label in module dataset");
    }
    set.entries.push_back({j.at("design_id").get<std::string>(), label});
  });
  return set;
}

void write_line_labels(const LineLabelSet& set, const std::filesystem::path& path) {
  std::string out;
  for (const auto& d : set.designs) {
    out += json{{"design_id", d.design_id}, {"labels", flags_to_string(d.labels)}}.dump();
    out += '\n';
  }
  io::write_text(path, out);
}

LineLabelSet read_line_labels(const std::filesystem::path& path) {
  LineLabelSet set;
  io::for_each_jsonl(path, [&](const json& j) {
    set.designs.push_back(
        {j.at("design_id").get<std::string>(), flags_from_string(j.at("labels").get<std::string>())});
  });
  return set;
}

}  // namespace vericwety::labeling
