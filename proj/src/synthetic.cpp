// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "vericwety/error.hpp"
#include "vericwety/gbdt.hpp"
#include "vericwety/io.hpp"
#include "vericwety/labeling.hpp"

namespace vericwety::synth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<const char*, 16> kWords = {"data", "count", "state", "buf",  "tmp",   "addr",
                                                "valid", "ready", "ctrl", "stat", "acc",   "idx",
                                                "mask", "flag",  "shift", "sum"};

// One generated line; `buggy` marks planted statements.
struct Line {
  std::string text;
  bool buggy = false;
};

class Builder {
 public:
  Builder(std::uint64_t seed, std::size_t index) : rng_(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1))) {
    for (int i = 0; i < 2; ++i) tag_.push_back(static_cast<char>('a' + rng_.below(26)));
    tag_.push_back(static_cast<char>('0' + rng_.below(10)));
  }

  const std::string& tag() const { return tag_; }
  gbdt::SplitMix64& rng() { return rng_; }

  std::string ident() {
    auto name = fmt::format("{}_{}", kWords[rng_.below(kWords.size())], rng_.below(100));
    idents_.push_back(name);
    return name;
  }
  std::string known() { return idents_.empty() ? ident() : idents_[rng_.below(idents_.size())]; }
  int width() { return std::array{7, 15, 31}[rng_.below(3)]; }

  Line decl() { return {fmt::format("  reg [{}:0] {};", width(), ident())}; }

  Line assign() {
    static constexpr std::array<const char*, 4> ops = {"^", "&", "|", "+"};
    if (rng_.below(3) == 0) return {fmt::format("  assign {} = {} >> {};", ident(), known(), 1 + rng_.below(4))};
    return {fmt::format("  assign {} = {} {} {};", ident(), known(), ops[rng_.below(ops.size())], known())};
  }

  Line body() {
    switch (rng_.below(4)) {
      case 0: return {fmt::format("      {} <= {} + 8'd{};", known(), known(), rng_.below(256))};
      case 1: return {fmt::format("      if ({} == 8'h{:02x}) {} <= {};", known(), rng_.below(256), known(), known())};
      case 2: return {fmt::format("      {} <= {{{}[6:0], {}[7]}};", known(), known(), known())};
      default: return {fmt::format("      {} <= {} ^ {};", known(), known(), known())};
    }
  }

  Line comment() {
    return {fmt::format("  // {} {} update", kWords[rng_.below(kWords.size())], kWords[rng_.below(kWords.size())])};
  }

  // Inserts `line` at a random position of `block`.
  void scatter(std::vector<Line>& block, Line line) {
    auto pos = rng_.below(block.size() + 1);
    block.insert(block.begin() + static_cast<std::ptrdiff_t>(pos), std::move(line));
  }

 private:
  gbdt::SplitMix64 rng_;
  std::string tag_;
  std::vector<std::string> idents_;
};

std::string random_hex(gbdt::SplitMix64& rng, int digits) {
  std::string s;
  for (int i = 0; i < digits; ++i) s.push_back("0123456789abcdef"[rng.below(16)]);
  return s;
}

SyntheticDesign build_design(const SyntheticSpec& spec, std::size_t index, const std::string& label,
                             bool decoy) {
  Builder b(spec.seed, index);
  const std::string& t = b.tag();
  auto filler = static_cast<int>(spec.filler_min +
                                 b.rng().below(static_cast<std::uint64_t>(spec.filler_max - spec.filler_min + 1)));

  std::vector<Line> decls, assigns, body;
  int n_decls = std::max(2, filler / 4);
  int n_assigns = std::max(2, filler / 4);
  for (int i = 0; i < n_decls; ++i) decls.push_back(b.decl());
  for (int i = 0; i < n_assigns; ++i) assigns.push_back(b.assign());
  for (int i = n_decls + n_assigns; i < filler; ++i) {
    if (b.rng().below(8) == 0) {
      assigns.push_back(b.comment());
    } else {
      body.push_back(b.body());
    }
  }

  if (label == "CWE-1244" || decoy) {
    decls.push_back({fmt::format("  reg [127:0] key_q_{};", t)});
    decls.push_back({fmt::format("  reg dbg_en_{};", t)});
    b.scatter(body, {fmt::format("      if (dbg_en_{0}) dout_{0} <= key_q_{0}[31:0];", t), label == "CWE-1244"});
  }
  if (label == "CWE-1244") {
    decls.push_back({fmt::format("  wire tdo_{};", t)});
    b.scatter(assigns, {fmt::format("  assign tdo_{0} = key_q_{0}[0] & dbg_en_{0};", t), true});
  } else if (label == "CWE-1245") {
    decls.push_back({fmt::format("  reg lock_{};", t)});
    decls.push_back({fmt::format("  reg test_mode_{};", t)});
    decls.push_back({fmt::format("  reg [31:0] cfg_{};", t)});
    b.scatter(body, {fmt::format("      if (!lock_{0} || test_mode_{0}) cfg_{0} <= din_{0};", t), true});
    b.scatter(body, {fmt::format("      lock_{} <= 1'b0;", t), true});
  } else if (label == "CWE-321") {
    std::string upper = t;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    decls.push_back({fmt::format("  localparam [127:0] ROOT_KEY_{} = 128'h{};", upper, random_hex(b.rng(), 32)), true});
    decls.push_back({fmt::format("  wire [31:0] key_word_{};", t)});
    b.scatter(assigns, {fmt::format("  assign key_word_{} = ROOT_KEY_{}[31:0];", t, upper), true});
  } else if (label == "CWE-506") {
    decls.push_back({fmt::format("  reg [31:0] trig_cnt_{};", t)});
    b.scatter(body, {fmt::format("      trig_cnt_{0} <= trig_cnt_{0} + 1'b1;", t), true});
    b.scatter(body, {fmt::format("      if (trig_cnt_{0} == 32'hdeadbeef) dout_{0} <= ~dout_{0};", t), true});
  }

  std::vector<Line> lines;
  lines.push_back({fmt::format("module blk_{}_{} (", t, index)});
  lines.push_back({"  input wire clk,"});
  lines.push_back({"  input wire rst_n,"});
  lines.push_back({fmt::format("  input wire [31:0] din_{},", t)});
  lines.push_back({fmt::format("  output reg [31:0] dout_{}", t)});
  lines.push_back({");"});
  lines.insert(lines.end(), decls.begin(), decls.end());
  lines.push_back({""});
  lines.insert(lines.end(), assigns.begin(), assigns.end());
  lines.push_back({""});
  lines.push_back({"  always @(posedge clk or negedge rst_n) begin"});
  lines.push_back({"    if (!rst_n) begin"});
  lines.push_back({fmt::format("      dout_{} <= 32'h0;", t)});
  lines.push_back({"    end else begin"});
  lines.insert(lines.end(), body.begin(), body.end());
  lines.push_back({"    end"});
  lines.push_back({"  end"});
  lines.push_back({"endmodule"});

  SyntheticDesign d;
  d.design_id = fmt::format("syn_{:04d}", index);
  d.label = label;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    d.source += lines[i].text + "\n";
    if (lines[i].buggy) d.buggy_lines.push_back(static_cast<int>(i + 1));
  }
  return d;
}

json reply_json(const std::string& label, const std::vector<int>& lines) {
  return json{{"cwe", label}, {"buggy_lines", lines}};
}

}  // namespace

std::vector<ClassShare> default_class_mix() {
  return {{"CWE-1244", 0.42}, {"CWE-1245", 0.31}, {"NONE", 0.19}, {"CWE-321", 0.075}, {"CWE-506", 0.005}};
}

std::vector<std::size_t> class_counts(const SyntheticSpec& spec) {
  double total = 0.0;
  for (const auto& c : spec.mix) total += c.weight;
  if (spec.mix.empty() || !(total > 0)) throw Error(ErrorCode::kInvalidArgument, "class mix is empty");
  std::vector<std::size_t> counts(spec.mix.size());
  std::vector<double> remainder(spec.mix.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < spec.mix.size(); ++k) {
    double exact = static_cast<double>(spec.designs) * spec.mix[k].weight / total;
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::vector<std::size_t> order(spec.mix.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < spec.designs; k = (k + 1) % order.size(), ++assigned) ++counts[order[k]];
  return counts;
}

std::vector<SyntheticDesign> generate(const SyntheticSpec& spec) {
  if (spec.filler_min < 4 || spec.filler_max < spec.filler_min) {
    throw Error(ErrorCode::kInvalidArgument, "filler range must satisfy 4 <= min <= max");
  }
  auto counts = class_counts(spec);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < counts.size(); ++k) labels.insert(labels.end(), counts[k], spec.mix[k].label);
  gbdt::SplitMix64 rng(spec.seed);
  for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

  std::vector<SyntheticDesign> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool decoy = labels[i] != "CWE-1244" && rng.uniform() < spec.decoy_rate;
    out.push_back(build_design(spec, i, labels[i], decoy));
  }
  return out;
}

fs::path write_workspace(const SyntheticSpec& spec, const fs::path& dir) {
  auto designs = generate(spec);
  std::vector<std::string> all_labels;
  for (const auto& c : spec.mix) all_labels.push_back(c.label);

  std::array<json, 3> fixtures{json{{"replies", json::object()}}, json{{"replies", json::object()}},
                               json{{"replies", json::object()}}};
  std::string gold;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const auto& d = designs[i];
    io::write_text(dir / "corpus" / (d.design_id + ".v"), d.source);
    gold += json{{"design_id", d.design_id}, {"label", d.label}}.dump() + "\n";
    if (i < spec.disagreements && all_labels.size() >= 3) {
      // Three different answers: no label reaches two votes.
      std::vector<std::string> others;
      for (const auto& l : all_labels) {
        if (l != d.label) others.push_back(l);
      }
      fixtures[0]["replies"][d.design_id] = reply_json(d.label, d.buggy_lines);
      fixtures[1]["replies"][d.design_id] = reply_json(others[0], {});
      fixtures[2]["replies"][d.design_id] = reply_json(others[1], {});
    } else {
      for (auto& f : fixtures) f["replies"][d.design_id] = reply_json(d.label, d.buggy_lines);
    }
  }
  io::write_text(dir / "gold.jsonl", gold);

  json providers = json::array();
  for (std::size_t k = 0; k < fixtures.size(); ++k) {
    auto name = fmt::format("fixture_{}.json", static_cast<char>('a' + k));
    io::write_text(dir / name, fixtures[k].dump(1) + "\n");
    providers.push_back(json{{"provider_id", fmt::format("mock-{}", static_cast<char>('a' + k))},
                             {"base_url", "mock://" + name},
                             {"model_name", "fixture"}});
  }
  io::write_text(dir / "providers.json", providers.dump(2) + "\n");

  // The default mix is a subset of taxonomy v2; anything else is spelled out.
  std::string taxonomy = "v2";
  const auto v2 = labeling::taxonomy_v2();
  if (!std::all_of(all_labels.begin(), all_labels.end(),
                   [&](const std::string& l) { return v2.contains(labeling::CweLabel{l}); })) {
    taxonomy.clear();
    for (const auto& l : all_labels) taxonomy += (taxonomy.empty() ? "" : ",") + l;
  }
  json config{{"corpus", {"corpus"}},
              {"taxonomy", taxonomy},
              {"providers", "providers.json"},
              {"embedding", {{"backend", "fallback"}, {"dimension", 256}, {"ngram", 3}}},
              {"split", {{"train_fraction", 0.8}, {"seed", spec.seed}}},
              {"gbdt", json::object()},
              {"line_features", "line+module"},
              {"threshold", 0.5},
              {"out_dir", "out"}};
  auto path = dir / "config.json";
  io::write_text(path, config.dump(2) + "\n");
  return path;
}

}  // namespace vericwety::synth
