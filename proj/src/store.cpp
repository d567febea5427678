// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/store.hpp"

#include <bit>
#include <cstring>

#include "json.hpp"
#include "vericwety/error.hpp"
#include "vericwety/io.hpp"

namespace vericwety::embed {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "vericwety-store/1";
constexpr const char* kIndexFile = "index.json";
constexpr const char* kVectorsFile = "vectors.bin";

void encode_le(const std::vector<float>& values, std::string& out) {
  out.resize(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(values[i]);
    out[i * 4 + 0] = static_cast<char>(bits & 0xFF);
    out[i * 4 + 1] = static_cast<char>((bits >> 8) & 0xFF);
    out[i * 4 + 2] = static_cast<char>((bits >> 16) & 0xFF);
    out[i * 4 + 3] = static_cast<char>((bits >> 24) & 0xFF);
  }
}

std::vector<float> decode_le(const std::string& bytes) {
  std::vector<float> values(bytes.size() / 4);
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = static_cast<std::uint32_t>(b[i * 4]) |
                         (static_cast<std::uint32_t>(b[i * 4 + 1]) << 8) |
                         (static_cast<std::uint32_t>(b[i * 4 + 2]) << 16) |
                         (static_cast<std::uint32_t>(b[i * 4 + 3]) << 24);
    values[i] = std::bit_cast<float>(bits);
  }
  return values;
}

}  // namespace

std::string EmbeddingStore::key(const std::string& design_id, VectorKind kind, int line_no) {
  std::string k = design_id;
  k.push_back('\x1f');
  k += kind_name(kind);
  k.push_back('\x1f');
  k += std::to_string(line_no);
  return k;
}

void EmbeddingStore::load_index() {
  auto j = io::read_json(dir_ / kIndexFile);
  if (j.value("format", "") != kFormat) {
    throw Error(ErrorCode::kFormat, (dir_ / kIndexFile).string() + ": unsupported store format");
  }
  backend_id_ = j.at("backend_id").get<std::string>();
  dimension_ = j.at("d").get<std::size_t>();
  std::uint64_t expected_offset = 0;
  for (const auto& e : j.at("entries")) {
    StoreEntry entry{e.at("design_id").get<std::string>(),
                     kind_from_name(e.at("kind").get<std::string>()),
                     e.at("line_no").get<int>(),
                     e.at("offset").get<std::uint64_t>(),
                     e.at("length").get<std::uint64_t>(),
                     e.value("content_sha256", "")};
    if (entry.offset != expected_offset || entry.length != dimension_) {
      throw Error(ErrorCode::kFormat, dir_.string() + ": index entries are not contiguous");
    }
    expected_offset += entry.length * 4;
    by_key_.emplace(key(entry.design_id, entry.kind, entry.line_no), entries_.size());
    if (entry.kind == VectorKind::kLine) ++lines_per_design_[entry.design_id];
    entries_.push_back(std::move(entry));
  }

  auto vectors = dir_ / kVectorsFile;
  if (!fs::exists(vectors)) {
    if (expected_offset != 0) throw Error(ErrorCode::kFormat, vectors.string() + " is missing");
  } else {
    auto size = fs::file_size(vectors);
    if (size < expected_offset) {
      throw Error(ErrorCode::kFormat, vectors.string() + " is shorter than its index");
    }
    // Bytes past the last indexed vector come from an interrupted writer.
    if (size > expected_offset) fs::resize_file(vectors, expected_offset);
  }
  if (expected_offset) {
    auto bytes = io::read_text(vectors);
    data_ = decode_le(bytes);
  }
}

EmbeddingStore EmbeddingStore::open(const fs::path& dir) {
  if (!fs::exists(dir / kIndexFile)) {
    throw Error(ErrorCode::kMissingArtifact, "embedding store not found at " + dir.string());
  }
  EmbeddingStore s;
  s.dir_ = dir;
  s.load_index();
  return s;
}

EmbeddingStore EmbeddingStore::open_or_create(const fs::path& dir, const std::string& backend_id,
                                              std::size_t dimension) {
  if (fs::exists(dir / kIndexFile)) {
    auto s = open(dir);
    s.expect_backend(backend_id, dimension);
    return s;
  }
  if (dimension == 0) throw Error(ErrorCode::kInvalidArgument, "store dimension must be > 0");
  fs::create_directories(dir);
  EmbeddingStore s;
  s.dir_ = dir;
  s.backend_id_ = backend_id;
  s.dimension_ = dimension;
  fs::remove(dir / kVectorsFile);
  s.dirty_ = true;
  s.flush();
  return s;
}

void EmbeddingStore::expect_backend(const std::string& backend_id, std::size_t dimension) const {
  if (backend_id != backend_id_ || dimension != dimension_) {
    throw Error(ErrorCode::kBackendMismatch,
                dir_.string() + " was built by " + backend_id_ + " (d=" + std::to_string(dimension_) +
                    "), requested " + backend_id + " (d=" + std::to_string(dimension) + ")");
  }
}

bool EmbeddingStore::contains(const std::string& design_id, VectorKind kind, int line_no) const {
  return by_key_.count(key(design_id, kind, line_no)) > 0;
}

const StoreEntry* EmbeddingStore::find(const std::string& design_id, VectorKind kind,
                                       int line_no) const {
  auto it = by_key_.find(key(design_id, kind, line_no));
  return it == by_key_.end() ? nullptr : &entries_[it->second];
}

void EmbeddingStore::write(const EmbeddingVector& vec, const std::string& content_sha256) {
  check_vector(vec.values, dimension_, vec.design_id);
  int line_no = vec.kind == VectorKind::kModule ? 0 : vec.line_no;
  auto k = key(vec.design_id, vec.kind, line_no);
  if (by_key_.count(k)) {
    throw Error(ErrorCode::kKeyExists, vec.design_id + " " + std::string(kind_name(vec.kind)) +
                                           " " + std::to_string(line_no) + " already stored");
  }
  if (!out_.is_open()) {
    out_.open(dir_ / kVectorsFile, std::ios::binary | std::ios::app);
    if (!out_) throw Error(ErrorCode::kIo, "cannot append to " + (dir_ / kVectorsFile).string());
  }
  std::string bytes;
  encode_le(vec.values, bytes);
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw Error(ErrorCode::kIo, "write to vectors.bin failed");

  StoreEntry entry{vec.design_id, vec.kind, line_no, data_.size() * 4ULL, dimension_, content_sha256};
  data_.insert(data_.end(), vec.values.begin(), vec.values.end());
  by_key_.emplace(std::move(k), entries_.size());
  if (vec.kind == VectorKind::kLine) ++lines_per_design_[vec.design_id];
  entries_.push_back(std::move(entry));
  dirty_ = true;
}

std::span<const float> EmbeddingStore::view(const std::string& design_id, VectorKind kind,
                                            int line_no) const {
  const auto* e = find(design_id, kind, line_no);
  if (!e) {
    throw Error(ErrorCode::kKeyMissing, "no " + std::string(kind_name(kind)) + " vector for " +
                                            design_id +
                                            (kind == VectorKind::kLine ? ":" + std::to_string(line_no) : ""));
  }
  return std::span<const float>(data_).subspan(e->offset / 4, e->length);
}

EmbeddingVector EmbeddingStore::read(const std::string& design_id, VectorKind kind,
                                     int line_no) const {
  auto v = view(design_id, kind, line_no);
  return {std::vector<float>(v.begin(), v.end()), kind, design_id,
          kind == VectorKind::kModule ? 0 : line_no};
}

std::size_t EmbeddingStore::line_count(const std::string& design_id) const {
  auto it = lines_per_design_.find(design_id);
  return it == lines_per_design_.end() ? 0 : it->second;
}

void EmbeddingStore::flush() {
  if (out_.is_open()) out_.flush();
  if (!dirty_) return;
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back(json{{"design_id", e.design_id},
                           {"kind", kind_name(e.kind)},
                           {"line_no", e.line_no},
                           {"offset", e.offset},
                           {"length", e.length},
                           {"content_sha256", e.content_sha256}});
  }
  json index{{"format", kFormat}, {"backend_id", backend_id_}, {"d", dimension_}, {"entries", entries}};
  io::write_text(dir_ / kIndexFile, index.dump(1) + "\n");
  dirty_ = false;
}

}  // namespace vericwety::embed
