// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vericwety/corpus.hpp"

namespace vericwety::embed {

struct BackendInfo {
  std::string backend_id;
  std::size_t dimension = 0;
  bool deterministic = false;
};

enum class VectorKind { kModule, kLine };

std::string_view kind_name(VectorKind kind);
VectorKind kind_from_name(std::string_view name);

struct EmbeddingVector {
  std::vector<float> values;
  VectorKind kind = VectorKind::kModule;
  std::string design_id;
  int line_no = 0;  // 0 for module vectors

  bool operator==(const EmbeddingVector&) const = default;
};

/// Line embedding followed by its design's module embedding (length 2d).
struct LineFeature {
  std::vector<float> values;
  std::string design_id;
  int line_no = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual const BackendInfo& info() const = 0;
  /// Returns a vector of exactly info().dimension finite values.
  virtual std::vector<float> embed(std::string_view text) = 0;
};

/// Signed feature hashing of character n-grams, L2-normalized.
///
/// Each n-byte window of `text` is a gram; text shorter than n (but not blank)
/// is a single gram. A gram adds +1 or -1 to bucket fnv1a64(gram) mod d, the
/// sign being + when fnv1a32(gram) is even. Blank text maps to the zero
/// vector. Requires d >= 16 and 2 <= n <= 5.
std::vector<float> fallback_embed(std::string_view text, std::size_t d = 256, std::size_t n = 3);

class FallbackBackend : public EmbeddingBackend {
 public:
  explicit FallbackBackend(std::size_t dimension = 256, std::size_t ngram = 3);
  const BackendInfo& info() const override { return info_; }
  std::vector<float> embed(std::string_view text) override;

 private:
  BackendInfo info_;
  std::size_t ngram_;
};

struct RemoteBackendConfig {
  std::string backend_id;
  std::string endpoint;  // full URL receiving POST {"text": ...}
  std::size_t dimension = 0;
  std::string api_key_env_var;
  double timeout_s = 120.0;
};

RemoteBackendConfig remote_config_from_json(const nlohmann::json& j);

/// Client for a service that answers POST {"text": ...} with
/// {"embedding": [floats]}. Pooling is the service's concern.
class RemoteBackend : public EmbeddingBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);
  const BackendInfo& info() const override { return info_; }
  std::vector<float> embed(std::string_view text) override;

 private:
  RemoteBackendConfig config_;
  BackendInfo info_;
};

/// Throws DimensionMismatch or InvalidArgument (non-finite) on violation.
void check_vector(std::span<const float> values, std::size_t dimension, std::string_view what);

EmbeddingVector embed_module(EmbeddingBackend& backend, const corpus::DesignUnit& unit);
std::vector<EmbeddingVector> embed_lines(EmbeddingBackend& backend, const corpus::DesignUnit& unit);

LineFeature combine_line_features(const EmbeddingVector& line, const EmbeddingVector& module);

}  // namespace vericwety::embed
