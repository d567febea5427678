// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vericwety/embeddings.hpp"

namespace vericwety::embed {

struct StoreEntry {
  std::string design_id;
  VectorKind kind = VectorKind::kModule;
  int line_no = 0;
  std::uint64_t offset = 0;  // bytes into vectors.bin
  std::uint64_t length = 0;  // number of float32 values
  std::string content_sha256;

  bool operator==(const StoreEntry&) const = default;
};

/// Directory-backed vector store: `index.json` plus `vectors.bin` holding
/// row-major little-endian float32 values. Keys are (design_id, kind, line_no)
/// and are write-once. Writes go through a single owner; flush() publishes the
/// index atomically, and bytes past the last published entry are discarded on
/// reopen, so an interrupted writer leaves a consistent store behind.
class EmbeddingStore {
 public:
  /// Opens an existing store or initializes an empty one. Throws
  /// BackendMismatch when an existing store was built with another backend_id
  /// or dimension.
  static EmbeddingStore open_or_create(const std::filesystem::path& dir,
                                       const std::string& backend_id, std::size_t dimension);
  /// Opens an existing store for reading, whatever its backend.
  static EmbeddingStore open(const std::filesystem::path& dir);

  EmbeddingStore(EmbeddingStore&&) = default;
  EmbeddingStore& operator=(EmbeddingStore&&) = default;
  ~EmbeddingStore() = default;

  const std::string& backend_id() const { return backend_id_; }
  std::size_t dimension() const { return dimension_; }
  const std::vector<StoreEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool contains(const std::string& design_id, VectorKind kind, int line_no = 0) const;
  const StoreEntry* find(const std::string& design_id, VectorKind kind, int line_no = 0) const;

  /// Throws KeyExists for a key already present, DimensionMismatch for a
  /// wrong-length vector.
  void write(const EmbeddingVector& vec, const std::string& content_sha256);
  /// Throws KeyMissing for an absent key.
  EmbeddingVector read(const std::string& design_id, VectorKind kind, int line_no = 0) const;
  std::span<const float> view(const std::string& design_id, VectorKind kind, int line_no = 0) const;
  /// Number of LINE vectors stored for a design.
  std::size_t line_count(const std::string& design_id) const;

  void flush();

  /// Throws BackendMismatch unless this store was built by `backend_id` at `dimension`.
  void expect_backend(const std::string& backend_id, std::size_t dimension) const;

 private:
  EmbeddingStore() = default;
  void load_index();
  static std::string key(const std::string& design_id, VectorKind kind, int line_no);

  std::filesystem::path dir_;
  std::string backend_id_;
  std::size_t dimension_ = 0;
  std::vector<StoreEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_key_;
  std::unordered_map<std::string, std::size_t> lines_per_design_;
  std::vector<float> data_;
  std::ofstream out_;
  bool dirty_ = false;
};

}  // namespace vericwety::embed
