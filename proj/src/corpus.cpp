// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "vericwety/error.hpp"
#include "vericwety/hashing.hpp"
#include "vericwety/io.hpp"

namespace vericwety::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f' || c == '\n';
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '$';
}

bool has_source_extension(const fs::path& p) {
  auto ext = p.extension().string();
  return ext == ".v" || ext == ".sv";
}

// Skips a comment or string literal starting at i, returning the index just
// past it, or i when text[i] starts neither.
std::size_t skip_non_code(std::string_view text, std::size_t i) {
  const std::size_t n = text.size();
  if (text[i] == '/' && i + 1 < n && text[i + 1] == '/') {
    auto nl = text.find('\n', i);
    return nl == std::string_view::npos ? n : nl;
  }
  if (text[i] == '/' && i + 1 < n && text[i + 1] == '*') {
    auto close = text.find("*/", i + 2);
    return close == std::string_view::npos ? n : close + 2;
  }
  if (text[i] == '"') {
    std::size_t j = i + 1;
    while (j < n && text[j] != '"' && text[j] != '\n') {
      if (text[j] == '\\' && j + 1 < n) ++j;
      ++j;
    }
    return j < n && text[j] == '"' ? j + 1 : j;
  }
  return i;
}

std::string parse_module_name(std::string_view text, std::size_t i) {
  const std::size_t n = text.size();
  for (;;) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) return {};
    auto skipped = skip_non_code(text, i);
    if (skipped != i && text[i] != '"') {
      i = skipped;
      continue;
    }
    break;
  }
  if (text[i] == '\\') {
    std::size_t j = i + 1;
    while (j < n && !is_space(text[j])) ++j;
    return std::string(text.substr(i, j - i));
  }
  std::size_t j = i;
  while (j < n && is_ident_char(text[j])) ++j;
  std::string name(text.substr(i, j - i));
  if (name == "automatic" || name == "static") return parse_module_name(text, j);
  return name;
}

}  // namespace

std::vector<SourceLine> segment_text(std::string_view text) {
  std::vector<SourceLine> lines;
  bool in_block = false;
  std::size_t start = 0;
  int line_no = 1;
  for (;;) {
    auto nl = text.find('\n', start);
    auto end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(start, end - start);

    bool blank = true;
    bool has_code = false;
    for (std::size_t i = 0; i < line.size();) {
      char c = line[i];
      if (!is_space(c)) blank = false;
      if (in_block) {
        if (c == '*' && i + 1 < line.size() && line[i + 1] == '/') {
          in_block = false;
          i += 2;
        } else {
          ++i;
        }
        continue;
      }
      if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') {
        break;  // rest of line is a comment; its non-space chars are not code
      }
      if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
        in_block = true;
        i += 2;
        continue;
      }
      if (c == '"') {
        has_code = true;
        auto j = skip_non_code(line, i);
        i = j > i ? j : i + 1;
        continue;
      }
      if (!is_space(c)) has_code = true;
      ++i;
    }

    SourceLine sl;
    sl.line_no = line_no++;
    sl.text = std::string(line);
    sl.is_blank = blank;
    sl.is_comment_only = !blank && !has_code;
    lines.push_back(std::move(sl));

    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

std::vector<SourceLine> segment_lines(const DesignUnit& unit) {
  return segment_text(unit.source_text);
}

std::string join_lines(const std::vector<SourceLine>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i].text;
  }
  return out;
}

std::vector<ModuleRegion> find_module_regions(std::string_view text) {
  struct Raw {
    std::size_t kw_begin;
    std::size_t kw_end;
    std::string name;
    bool terminated;
  };
  std::vector<Raw> raw;
  bool open = false;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n;) {
    auto skipped = skip_non_code(text, i);
    if (skipped != i) {
      i = skipped;
      continue;
    }
    char c = text[i];
    if (c == '\\') {  // escaped identifier, runs to whitespace
      while (i < n && !is_space(text[i])) ++i;
      continue;
    }
    if (is_ident_start(c) && (i == 0 || (!is_ident_char(text[i - 1]) && text[i - 1] != '`'))) {
      std::size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      std::string_view word = text.substr(i, j - i);
      if (!open && (word == "module" || word == "macromodule")) {
        raw.push_back({i, j, parse_module_name(text, j), false});
        open = true;
      } else if (open && word == "endmodule") {
        raw.back().kw_end = j;
        raw.back().terminated = true;
        open = false;
      }
      i = j;
      continue;
    }
    if (is_ident_char(c)) {
      while (i < n && is_ident_char(text[i])) ++i;
      continue;
    }
    ++i;
  }

  std::vector<ModuleRegion> regions;
  std::size_t prev_end = 0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    ModuleRegion r;
    r.module_name = raw[k].name;
    r.terminated = raw[k].terminated;

    std::size_t begin = raw[k].kw_begin;
    while (begin > 0 && text[begin - 1] != '\n') --begin;
    r.begin = std::max(begin, prev_end);

    if (!raw[k].terminated) {
      std::size_t end = n;
      while (end > r.begin && text[end - 1] == '\n') --end;
      r.end = end;
    } else {
      auto nl = text.find('\n', raw[k].kw_end);
      std::size_t end = nl == std::string_view::npos ? n : nl;
      if (k + 1 < raw.size() && raw[k + 1].kw_begin < end) end = raw[k].kw_end;
      r.end = end;
    }
    prev_end = r.end;
    regions.push_back(std::move(r));
  }
  return regions;
}

std::vector<DesignUnit> units_from_text(std::string_view text, const std::string& stem,
                                        const std::string& origin_path) {
  auto regions = find_module_regions(text);
  std::vector<DesignUnit> units;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const auto& r = regions[k];
    if (!r.terminated) {
      spdlog::warn("{}: module '{}' has no endmodule; region runs to end of file", origin_path,
                   r.module_name);
    }
    DesignUnit u;
    u.design_id = regions.size() == 1 ? stem : stem + "#" + std::to_string(k + 1);
    u.module_name = r.module_name;
    u.source_text = std::string(text.substr(r.begin, r.end - r.begin));
    u.origin_path = origin_path;
    u.lines = segment_text(u.source_text);
    units.push_back(std::move(u));
  }
  return units;
}

std::size_t sanitize_utf8(std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t replaced = 0;
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n;) {
    unsigned char c = s[i];
    std::size_t len = 0;
    std::uint32_t min_cp = 0;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
    }
    bool ok = len > 0 && i + len <= n;
    std::uint32_t cp = ok ? (c & (0xFF >> (len + 1))) : 0;
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (s[i + k] & 0x3F);
      }
    }
    ok = ok && cp >= min_cp && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (ok) {
      out.append(text, i, len);
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      ++replaced;
      ++i;
    }
  }
  if (replaced) text = std::move(out);
  return replaced;
}

namespace {

std::vector<DesignUnit> load_source_file(const fs::path& file, const std::string& stem,
                                         const std::string& origin) {
  std::string text = io::read_text(file);
  if (text.empty()) {
    spdlog::warn("{}: empty design file skipped", origin);
    return {};
  }
  if (auto n = sanitize_utf8(text)) {
    spdlog::warn("{}: replaced {} invalid UTF-8 byte(s)", origin, n);
  }
  auto units = units_from_text(text, stem, origin);
  if (units.empty()) spdlog::warn("{}: no module found", origin);
  for (auto it = units.begin(); it != units.end();) {
    if (it->source_text.empty()) {
      spdlog::warn("{}: empty design skipped", it->design_id);
      it = units.erase(it);
    } else {
      ++it;
    }
  }
  return units;
}

std::string stem_of(const fs::path& rel) {
  auto p = rel;
  p.replace_extension();
  return p.generic_string();
}

std::vector<DesignUnit> load_from_manifest(const fs::path& manifest_path) {
  auto manifest = read_manifest(manifest_path);
  auto base = manifest_path.parent_path();

  std::map<std::string, std::vector<const ManifestEntry*>> by_file;
  std::vector<std::string> file_order;
  for (const auto& e : manifest.entries) {
    if (!by_file.count(e.origin_path)) file_order.push_back(e.origin_path);
    by_file[e.origin_path].push_back(&e);
  }

  std::map<std::string, DesignUnit> loaded;
  for (const auto& origin : file_order) {
    fs::path file = fs::path(origin).is_absolute() ? fs::path(origin) : base / origin;
    const auto& first_id = by_file[origin].front()->design_id;
    auto stem = first_id.substr(0, first_id.rfind('#') == std::string::npos
                                       ? first_id.size()
                                       : first_id.rfind('#'));
    for (auto& u : load_source_file(file, stem, origin)) loaded.emplace(u.design_id, std::move(u));
  }

  std::vector<DesignUnit> units;
  for (const auto& e : manifest.entries) {
    auto it = loaded.find(e.design_id);
    if (it == loaded.end()) {
      throw Error(ErrorCode::kChecksumMismatch,
                  "manifest entry " + e.design_id + " not found in " + e.origin_path);
    }
    auto& u = it->second;
    if (sha256_hex(u.source_text) != e.sha256 || u.line_count() != e.line_count) {
      throw Error(ErrorCode::kChecksumMismatch,
                  "checksum or line count mismatch for " + e.design_id);
    }
    units.push_back(std::move(u));
  }
  return units;
}

}  // namespace

std::vector<DesignUnit> load_corpus(const fs::path& root) {
  if (!fs::exists(root)) throw Error(ErrorCode::kIo, "corpus path does not exist: " + root.string());

  std::vector<DesignUnit> units;
  if (fs::is_directory(root)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && has_source_extension(entry.path())) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto rel = fs::relative(f, root);
      auto loaded = load_source_file(f, stem_of(rel), rel.generic_string());
      units.insert(units.end(), std::make_move_iterator(loaded.begin()),
                   std::make_move_iterator(loaded.end()));
    }
  } else if (root.extension() == ".jsonl") {
    units = load_from_manifest(root);
  } else if (has_source_extension(root)) {
    units = load_source_file(root, root.stem().string(), root.filename().string());
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unsupported corpus path: " + root.string());
  }

  if (units.empty()) throw Error(ErrorCode::kEmptyCorpus, "no module found under " + root.string());

  std::set<std::string> seen;
  for (const auto& u : units) {
    if (!seen.insert(u.design_id).second) {
      throw Error(ErrorCode::kDuplicateDesignId, "duplicate design id " + u.design_id);
    }
  }
  return units;
}

CorpusManifest build_manifest(const std::vector<DesignUnit>& units) {
  CorpusManifest m;
  for (const auto& u : units) {
    m.entries.push_back({u.design_id, u.origin_path, u.line_count(), sha256_hex(u.source_text)});
  }
  return m;
}

CorpusStats corpus_stats(const std::vector<DesignUnit>& units) {
  CorpusStats s;
  s.designs = units.size();
  for (const auto& u : units) {
    s.total_loc += u.line_count();
    for (const auto& l : u.lines) {
      s.blank_lines += l.is_blank;
      s.comment_only_lines += l.is_comment_only;
    }
  }
  return s;
}

void write_manifest(const CorpusManifest& manifest, const fs::path& path) {
  std::string out;
  for (const auto& e : manifest.entries) {
    json j{{"design_id", e.design_id},
           {"origin_path", e.origin_path},
           {"line_count", e.line_count},
           {"sha256", e.sha256}};
    out += j.dump();
    out += '\n';
  }
  io::write_text(path, out);
}

CorpusManifest read_manifest(const fs::path& path) {
  CorpusManifest m;
  io::for_each_jsonl(path, [&](const json& j) {
    m.entries.push_back({j.at("design_id").get<std::string>(), j.at("origin_path").get<std::string>(),
                         j.at("line_count").get<std::size_t>(), j.at("sha256").get<std::string>()});
  });
  return m;
}

}  // namespace vericwety::corpus
