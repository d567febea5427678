// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "vericwety/corpus.hpp"
#include "vericwety/labeling.hpp"

namespace vericwety::labeling {

struct ProviderConfig {
  std::string provider_id;
  std::string base_url;  // http(s)://host[:port][/prefix] or mock://<fixture.json>
  std::string model_name;
  std::string api_key_env_var;
  double timeout_s = 60.0;
  int max_retries = 2;
  double min_interval_s = 0.0;  // per-provider rate limit
};

/// Reads a provider config file: a JSON array of ProviderConfig objects (or an
/// object with a "providers" array). Relative mock fixture paths resolve
/// against the config file's directory.
std::vector<ProviderConfig> load_provider_configs(const std::filesystem::path& path);
std::vector<ProviderConfig> provider_configs_from_json(const nlohmann::json& j,
                                                       const std::filesystem::path& base_dir);

struct PromptRequest {
  std::string design_id;
  std::string prompt;
};

/// A single labeling model reached through some transport. complete() returns
/// the raw reply text or throws Error with kProviderTimeout,
/// kMalformedResponse, or kAuthError.
class LabelProvider {
 public:
  virtual ~LabelProvider() = default;
  virtual const std::string& id() const = 0;
  virtual std::string complete(const PromptRequest& request) = 0;
};

/// Offline provider answering from a fixture table keyed by design id.
///
/// Fixture file: {"replies": {"<design_id>": <reply>}, "default": <reply>}
/// where <reply> is {"cwe": ..., "buggy_lines": [...]} (serialized as the raw
/// response), a raw string returned verbatim, or {"error": "timeout"|"auth"}.
class MockProvider : public LabelProvider {
 public:
  MockProvider(std::string id, nlohmann::json fixture);
  static std::unique_ptr<MockProvider> from_file(std::string id, const std::filesystem::path& path);

  const std::string& id() const override { return id_; }
  std::string complete(const PromptRequest& request) override;

 private:
  std::string id_;
  nlohmann::json fixture_;
};

/// OpenAI-compatible chat-completions client (one gateway fronts every model).
class HttpChatProvider : public LabelProvider {
 public:
  explicit HttpChatProvider(ProviderConfig config);

  const std::string& id() const override { return config_.provider_id; }
  std::string complete(const PromptRequest& request) override;

 private:
  ProviderConfig config_;
  std::mutex rate_mu_;
  std::chrono::steady_clock::time_point last_request_{};
};

std::unique_ptr<LabelProvider> make_provider(const ProviderConfig& config);

struct PromptTemplate {
  std::string version;
  std::string text;  // placeholders: {taxonomy}, {numbered_source}
};

PromptTemplate default_prompt_template();
PromptTemplate load_prompt_template(const std::filesystem::path& path);
std::string numbered_source(const corpus::DesignUnit& unit);
std::string render_prompt(const PromptTemplate& tmpl, const Taxonomy& taxonomy,
                          const corpus::DesignUnit& unit);

/// Sends one design to one provider. Timeouts and malformed replies become
/// abstentions; AuthError propagates and aborts the batch.
ProviderVerdict query_provider(LabelProvider& provider, const corpus::DesignUnit& unit,
                               const Taxonomy& taxonomy, const PromptTemplate& tmpl);

/// Queries every provider for every design on a bounded worker pool and votes.
/// Results are in corpus order regardless of scheduling.
std::vector<VoteResult> label_corpus(const std::vector<std::unique_ptr<LabelProvider>>& providers,
                                     const std::vector<corpus::DesignUnit>& units,
                                     const Taxonomy& taxonomy, const PromptTemplate& tmpl,
                                     std::size_t workers);

}  // namespace vericwety::labeling
