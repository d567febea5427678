// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/embeddings.hpp"

#include <cmath>
#include <cstdlib>

#include "httplib.h"
#include "vericwety/error.hpp"
#include "vericwety/hashing.hpp"

namespace vericwety::embed {

using nlohmann::json;

std::string_view kind_name(VectorKind kind) {
  return kind == VectorKind::kModule ? "MODULE" : "LINE";
}

VectorKind kind_from_name(std::string_view name) {
  if (name == "MODULE") return VectorKind::kModule;
  if (name == "LINE") return VectorKind::kLine;
  throw Error(ErrorCode::kFormat, "unknown vector kind " + std::string(name));
}

std::vector<float> fallback_embed(std::string_view text, std::size_t d, std::size_t n) {
  if (d < 16) throw Error(ErrorCode::kInvalidArgument, "fallback dimension must be >= 16");
  if (n < 2 || n > 5) throw Error(ErrorCode::kInvalidArgument, "n-gram size must be in [2, 5]");

  std::vector<float> out(d, 0.0f);
  if (text.find_first_not_of(" \t\r\n\v\f") == std::string_view::npos) return out;

  std::vector<double> acc(d, 0.0);
  auto add = [&](std::string_view gram) {
    auto bucket = fnv1a64(gram) % d;
    acc[bucket] += (fnv1a32(gram) & 1U) ? -1.0 : 1.0;
  };
  if (text.size() < n) {
    add(text);
  } else {
    for (std::size_t i = 0; i + n <= text.size(); ++i) add(text.substr(i, n));
  }

  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return out;
  for (std::size_t i = 0; i < d; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

FallbackBackend::FallbackBackend(std::size_t dimension, std::size_t ngram) : ngram_(ngram) {
  fallback_embed("", dimension, ngram);  // validates arguments
  info_ = {"fallback-ngram-fnv1a/n=" + std::to_string(ngram), dimension, true};
}

std::vector<float> FallbackBackend::embed(std::string_view text) {
  return fallback_embed(text, info_.dimension, ngram_);
}

RemoteBackendConfig remote_config_from_json(const json& j) {
  RemoteBackendConfig c;
  c.backend_id = j.at("backend_id").get<std::string>();
  c.endpoint = j.at("endpoint").get<std::string>();
  c.dimension = j.at("dimension").get<std::size_t>();
  c.api_key_env_var = j.value("api_key_env_var", "");
  c.timeout_s = j.value("timeout_s", 120.0);
  if (c.dimension == 0) throw Error(ErrorCode::kInvalidArgument, "remote dimension must be > 0");
  return c;
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config)
    : config_(std::move(config)), info_{config_.backend_id, config_.dimension, false} {}

std::vector<float> RemoteBackend::embed(std::string_view text) {
  auto scheme_end = config_.endpoint.find("://");
  auto path_begin = scheme_end == std::string::npos ? std::string::npos
                                                    : config_.endpoint.find('/', scheme_end + 3);
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "bad embedding endpoint " + config_.endpoint);
  }
  std::string host = config_.endpoint.substr(0, path_begin);
  std::string path = path_begin == std::string::npos ? "/" : config_.endpoint.substr(path_begin);

  httplib::Headers headers;
  if (!config_.api_key_env_var.empty()) {
    if (const char* key = std::getenv(config_.api_key_env_var.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  httplib::Client client(host);
  auto timeout = std::chrono::milliseconds(static_cast<long long>(config_.timeout_s * 1000));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  auto res = client.Post(path, headers, json{{"text", text}}.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kBackendUnavailable,
                config_.backend_id + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                config_.backend_id + ": HTTP " + std::to_string(res->status));
  }
  std::vector<float> values;
  try {
    auto body = json::parse(res->body);
    values = body.at("embedding").get<std::vector<float>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, config_.backend_id + ": bad payload: " + e.what());
  }
  check_vector(values, info_.dimension, config_.backend_id);
  return values;
}

void check_vector(std::span<const float> values, std::size_t dimension, std::string_view what) {
  if (values.size() != dimension) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": expected " +
                                                   std::to_string(dimension) + " values, got " +
                                                   std::to_string(values.size()));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": non-finite embedding value");
    }
  }
}

EmbeddingVector embed_module(EmbeddingBackend& backend, const corpus::DesignUnit& unit) {
  if (unit.source_text.empty()) {
    throw Error(ErrorCode::kInvalidArgument, unit.design_id + ": empty design");
  }
  EmbeddingVector v{backend.embed(unit.source_text), VectorKind::kModule, unit.design_id, 0};
  check_vector(v.values, backend.info().dimension, unit.design_id);
  return v;
}

std::vector<EmbeddingVector> embed_lines(EmbeddingBackend& backend, const corpus::DesignUnit& unit) {
  if (unit.source_text.empty()) {
    throw Error(ErrorCode::kInvalidArgument, unit.design_id + ": empty design");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(unit.lines.size());
  for (const auto& line : unit.lines) {
    EmbeddingVector v{backend.embed(line.text), VectorKind::kLine, unit.design_id, line.line_no};
    check_vector(v.values, backend.info().dimension, unit.design_id);
    out.push_back(std::move(v));
  }
  return out;
}

LineFeature combine_line_features(const EmbeddingVector& line, const EmbeddingVector& module) {
  if (line.design_id != module.design_id) {
    throw Error(ErrorCode::kDesignMismatch,
                "line of " + line.design_id + " combined with module of " + module.design_id);
  }
  if (line.kind != VectorKind::kLine || module.kind != VectorKind::kModule) {
    throw Error(ErrorCode::kInvalidArgument, "combine_line_features expects (LINE, MODULE)");
  }
  if (line.values.size() != module.values.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "line and module vectors differ in length");
  }
  LineFeature f{{}, line.design_id, line.line_no};
  f.values.reserve(line.values.size() * 2);
  f.values.insert(f.values.end(), line.values.begin(), line.values.end());
  f.values.insert(f.values.end(), module.values.begin(), module.values.end());
  return f;
}

}  // namespace vericwety::embed
