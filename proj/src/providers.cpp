// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vericwety/providers.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "vericwety/error.hpp"
#include "vericwety/io.hpp"
#include "vericwety/parallel.hpp"

namespace vericwety::labeling {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kMockScheme = "mock://";

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "base_url lacks a scheme: " + url);
  }
  auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl p;
  p.scheme_host_port = url.substr(0, path_begin);
  p.path_prefix = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!p.path_prefix.empty() && p.path_prefix.back() == '/') p.path_prefix.pop_back();
  return p;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::vector<ProviderConfig> provider_configs_from_json(const json& j, const fs::path& base_dir) {
  const json& list = j.is_object() ? j.at("providers") : j;
  if (!list.is_array()) throw Error(ErrorCode::kFormat, "provider config must be a list");
  std::vector<ProviderConfig> out;
  for (const auto& e : list) {
    ProviderConfig c;
    c.provider_id = e.at("provider_id").get<std::string>();
    c.base_url = e.at("base_url").get<std::string>();
    c.model_name = e.value("model_name", "");
    c.api_key_env_var = e.value("api_key_env_var", "");
    c.timeout_s = e.value("timeout_s", 60.0);
    c.max_retries = e.value("max_retries", 2);
    c.min_interval_s = e.value("min_interval_s", 0.0);
    if (c.base_url.rfind(kMockScheme, 0) == 0) {
      fs::path fixture = c.base_url.substr(kMockScheme.size());
      if (fixture.is_relative()) fixture = base_dir / fixture;
      c.base_url = std::string(kMockScheme) + fixture.string();
    }
    if (c.timeout_s <= 0 || c.max_retries < 0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid timeout/retries for " + c.provider_id);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ProviderConfig> load_provider_configs(const fs::path& path) {
  return provider_configs_from_json(io::read_json(path), path.parent_path());
}

MockProvider::MockProvider(std::string id, json fixture)
    : id_(std::move(id)), fixture_(std::move(fixture)) {}

std::unique_ptr<MockProvider> MockProvider::from_file(std::string id, const fs::path& path) {
  return std::make_unique<MockProvider>(std::move(id), io::read_json(path));
}

std::string MockProvider::complete(const PromptRequest& request) {
  const json* reply = nullptr;
  if (auto replies = fixture_.find("replies"); replies != fixture_.end()) {
    if (auto it = replies->find(request.design_id); it != replies->end()) reply = &*it;
  }
  if (!reply) {
    if (auto def = fixture_.find("default"); def != fixture_.end()) reply = &*def;
  }
  if (!reply) {
    throw Error(ErrorCode::kMalformedResponse, id_ + ": no fixture reply for " + request.design_id);
  }
  if (reply->is_string()) return reply->get<std::string>();
  if (auto err = reply->find("error"); err != reply->end()) {
    auto kind = err->get<std::string>();
    if (kind == "auth") throw Error(ErrorCode::kAuthError, id_ + ": simulated auth failure");
    throw Error(ErrorCode::kProviderTimeout, id_ + ": simulated timeout");
  }
  return reply->dump();
}

HttpChatProvider::HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {}

std::string HttpChatProvider::complete(const PromptRequest& request) {
  std::string api_key;
  if (!config_.api_key_env_var.empty()) {
    const char* v = std::getenv(config_.api_key_env_var.c_str());
    if (!v || !*v) {
      throw Error(ErrorCode::kAuthError,
                  config_.provider_id + ": environment variable " + config_.api_key_env_var +
                      " is not set");
    }
    api_key = v;
  }

  auto url = parse_url(config_.base_url);
  json body{{"model", config_.model_name},
            {"temperature", 0},
            {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})}};
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  const auto timeout = std::chrono::milliseconds(static_cast<long long>(config_.timeout_s * 1000));
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 << attempt));
    if (config_.min_interval_s > 0) {
      std::lock_guard lock(rate_mu_);
      auto earliest = last_request_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                          std::chrono::duration<double>(config_.min_interval_s));
      auto now = std::chrono::steady_clock::now();
      if (now < earliest) std::this_thread::sleep_for(earliest - now);
      last_request_ = std::chrono::steady_clock::now();
    }

    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(url.path_prefix + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::kAuthError,
                  config_.provider_id + ": HTTP " + std::to_string(res->status));
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kMalformedResponse,
                  config_.provider_id + ": HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    auto reply = json::parse(res->body, nullptr, false);
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::kMalformedResponse,
                  config_.provider_id + ": unexpected completion payload");
    }
  }
  throw Error(ErrorCode::kProviderTimeout, config_.provider_id + ": " + last_error);
}

std::unique_ptr<LabelProvider> make_provider(const ProviderConfig& config) {
  if (config.base_url.rfind(kMockScheme, 0) == 0) {
    return MockProvider::from_file(config.provider_id, config.base_url.substr(kMockScheme.size()));
  }
  return std::make_unique<HttpChatProvider>(config);
}

PromptTemplate default_prompt_template() {
  return {"prompt-v1",
          "You are a hardware security reviewer. Classify the Verilog module below into exactly "
          "one of these CWE classes: {taxonomy}. Use NONE if the module has no weakness.\n"
          "Also list the line numbers that contain the weakness.\n"
          "Reply with JSON only, in the form {\"cwe\": \"<label>\", \"buggy_lines\": [<ints>]}.\n"
          "\n"
          "{numbered_source}\n"};
}

PromptTemplate load_prompt_template(const fs::path& path) {
  auto j = io::read_json(path);
  PromptTemplate t{j.at("version").get<std::string>(), j.at("text").get<std::string>()};
  if (t.text.find("{numbered_source}") == std::string::npos) {
    throw Error(ErrorCode::kFormat, path.string() + ": template lacks {numbered_source}");
  }
  return t;
}

std::string numbered_source(const corpus::DesignUnit& unit) {
  std::string out;
  for (const auto& l : unit.lines) {
    out += std::to_string(l.line_no);
    out += ": ";
    out += l.text;
    out += '\n';
  }
  return out;
}

std::string render_prompt(const PromptTemplate& tmpl, const Taxonomy& taxonomy,
                          const corpus::DesignUnit& unit) {
  std::string text = tmpl.text;
  replace_all(text, "{taxonomy}", taxonomy.joined());
  replace_all(text, "{numbered_source}", numbered_source(unit));
  return text;
}

ProviderVerdict query_provider(LabelProvider& provider, const corpus::DesignUnit& unit,
                               const Taxonomy& taxonomy, const PromptTemplate& tmpl) {
  PromptRequest req{unit.design_id, render_prompt(tmpl, taxonomy, unit)};
  try {
    auto raw = provider.complete(req);
    auto v = parse_reply(raw, taxonomy, unit.line_count(), provider.id(), unit.design_id);
    if (v.abstained()) spdlog::warn("{}/{}: abstain ({})", provider.id(), unit.design_id, v.failure);
    return v;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kAuthError) throw;
    if (e.code() != ErrorCode::kProviderTimeout && e.code() != ErrorCode::kMalformedResponse) throw;
    spdlog::warn("{}/{}: abstain ({})", provider.id(), unit.design_id, e.what());
    ProviderVerdict v;
    v.provider_id = provider.id();
    v.design_id = unit.design_id;
    v.failure = std::string(error_code_name(e.code())) + ": " + e.what();
    return v;
  }
}

std::vector<VoteResult> label_corpus(const std::vector<std::unique_ptr<LabelProvider>>& providers,
                                     const std::vector<corpus::DesignUnit>& units,
                                     const Taxonomy& taxonomy, const PromptTemplate& tmpl,
                                     std::size_t workers) {
  if (providers.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "majority voting needs at least 3 providers");
  }
  const std::size_t np = providers.size();
  std::vector<ProviderVerdict> verdicts(units.size() * np);
  parallel_for(verdicts.size(), workers, [&](std::size_t k) {
    verdicts[k] = query_provider(*providers[k % np], units[k / np], taxonomy, tmpl);
  });

  std::vector<VoteResult> out;
  out.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::vector<ProviderVerdict> mine(std::make_move_iterator(verdicts.begin() + i * np),
                                      std::make_move_iterator(verdicts.begin() + (i + 1) * np));
    out.push_back(vote(std::move(mine), units[i].line_count()));
  }
  return out;
}

}  // namespace vericwety::labeling
