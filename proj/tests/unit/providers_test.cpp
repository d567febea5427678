// Copyright 2026 The vericwety Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "vericwety/error.hpp"
#include "vericwety/io.hpp"
#include "vericwety/providers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace vericwety;
using namespace vericwety::labeling;

namespace {

corpus::DesignUnit small_unit(const std::string& id) {
  return corpus::units_from_text("module " + id + ";\n  wire w;\nendmodule", id, id + ".v").front();
}

class CountingProvider : public LabelProvider {
 public:
  CountingProvider(std::string id, std::string reply) : id_(std::move(id)), reply_(std::move(reply)) {}
  const std::string& id() const override { return id_; }
  std::string complete(const PromptRequest& req) override {
    ++calls;
    last_design = req.design_id;
    return reply_;
  }
  std::atomic<int> calls{0};
  std::string last_design;

 private:
  std::string id_;
  std::string reply_;
};

// Serves /v1/chat/completions on an ephemeral port for the lifetime of the object.
class ChatServer {
 public:
  explicit ChatServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ChatServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

std::string completion(const std::string& content) {
  return json{{"choices", json::array({json{{"message", json{{"role", "assistant"}, {"content", content}}}}})}}
      .dump();
}

}  // namespace

TEST(MockProvider, AnswersFromFixtureAndDefault) {
  json fixture{{"replies", {{"a", {{"cwe", "CWE-1244"}, {"buggy_lines", {2}}}}}},
               {"default", {{"cwe", "NONE"}, {"buggy_lines", json::array()}}}};
  MockProvider p("m", fixture);
  auto tax = taxonomy_v2();
  auto tmpl = default_prompt_template();
  auto va = query_provider(p, small_unit("a"), tax, tmpl);
  EXPECT_EQ(va.module_label->value, "CWE-1244");
  EXPECT_EQ(va.buggy_lines, (std::vector<int>{2}));
  auto vb = query_provider(p, small_unit("b"), tax, tmpl);
  EXPECT_EQ(vb.module_label->value, "NONE");
}

TEST(MockProvider, TimeoutBecomesAbstention) {
  MockProvider p("m", json{{"default", {{"error", "timeout"}}}});
  auto v = query_provider(p, small_unit("a"), taxonomy_v2(), default_prompt_template());
  EXPECT_TRUE(v.abstained());
  EXPECT_NE(v.failure.find("ProviderTimeout"), std::string::npos);
}

TEST(MockProvider, MissingFixtureEntryBecomesAbstention) {
  MockProvider p("m", json{{"replies", json::object()}});
  auto v = query_provider(p, small_unit("a"), taxonomy_v2(), default_prompt_template());
  EXPECT_TRUE(v.abstained());
}

TEST(MockProvider, AuthErrorPropagates) {
  MockProvider p("m", json{{"default", {{"error", "auth"}}}});
  try {
    query_provider(p, small_unit("a"), taxonomy_v2(), default_prompt_template());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuthError);
  }
}

TEST(ProviderConfig, MockPathsResolveAgainstConfigDirectory) {
  auto dir = fs::temp_directory_path() / "vericwety_providers_cfg";
  fs::remove_all(dir);
  io::write_text(dir / "fx.json", R"({"default": {"cwe": "NONE"}})");
  io::write_text(dir / "providers.json",
                 R"([{"provider_id": "a", "base_url": "mock://fx.json"},
                     {"provider_id": "b", "base_url": "https://gw.example/v1", "model_name": "m",
                      "api_key_env_var": "K", "timeout_s": 5, "max_retries": 1}])");
  auto configs = load_provider_configs(dir / "providers.json");
  ASSERT_EQ(configs.size(), 2u);
  EXPECT_EQ(configs[0].base_url, "mock://" + (dir / "fx.json").string());
  EXPECT_EQ(configs[1].timeout_s, 5.0);
  EXPECT_EQ(configs[1].max_retries, 1);
  auto p = make_provider(configs[0]);
  EXPECT_EQ(p->id(), "a");
  EXPECT_NE(p->complete({"x", ""}).find("NONE"), std::string::npos);

  EXPECT_THROW(provider_configs_from_json(json::parse(R"([{"provider_id": "c", "base_url": "x", "timeout_s": 0}])"), dir),
               Error);
}

TEST(Prompt, RendersTaxonomyAndNumberedSource) {
  auto text = render_prompt(default_prompt_template(), taxonomy_v2(), small_unit("k"));
  EXPECT_NE(text.find("1: module k;\n2:   wire w;\n3: endmodule\n"), std::string::npos);
  EXPECT_NE(text.find("CWE-1244, CWE-1245, NONE"), std::string::npos);
  EXPECT_EQ(text.find("{taxonomy}"), std::string::npos);
  EXPECT_EQ(default_prompt_template().version, "prompt-v1");
}

TEST(Prompt, TemplateFileMustContainSourcePlaceholder) {
  auto dir = fs::temp_directory_path() / "vericwety_providers_tmpl";
  fs::remove_all(dir);
  io::write_text(dir / "ok.json", R"({"version": "t1", "text": "{taxonomy}\n{numbered_source}"})");
  io::write_text(dir / "bad.json", R"({"version": "t2", "text": "no source"})");
  EXPECT_EQ(load_prompt_template(dir / "ok.json").version, "t1");
  EXPECT_THROW(load_prompt_template(dir / "bad.json"), Error);
}

TEST(LabelCorpus, ResultsFollowCorpusOrder) {
  std::vector<std::unique_ptr<LabelProvider>> providers;
  for (const char* id : {"a", "b", "c"}) {
    providers.push_back(std::make_unique<CountingProvider>(id, R"({"cwe": "CWE-321", "buggy_lines": [2]})"));
  }
  std::vector<corpus::DesignUnit> units;
  for (int i = 0; i < 12; ++i) units.push_back(small_unit("u" + std::to_string(i)));
  auto votes = label_corpus(providers, units, taxonomy_v2(), default_prompt_template(), 4);
  ASSERT_EQ(votes.size(), units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    EXPECT_EQ(votes[i].design_id, units[i].design_id);
    EXPECT_EQ(votes[i].final_label.value, "CWE-321");
    EXPECT_EQ(votes[i].line_flags, (std::vector<std::uint8_t>{0, 1, 0}));
    ASSERT_EQ(votes[i].verdicts.size(), 3u);
    EXPECT_EQ(votes[i].verdicts[0].provider_id, "a");
    EXPECT_EQ(votes[i].verdicts[2].provider_id, "c");
  }
  for (const auto& p : providers) EXPECT_EQ(static_cast<CountingProvider&>(*p).calls, 12);
}

TEST(LabelCorpus, NeedsThreeProviders) {
  std::vector<std::unique_ptr<LabelProvider>> providers;
  providers.push_back(std::make_unique<CountingProvider>("a", "{}"));
  EXPECT_THROW(label_corpus(providers, {small_unit("x")}, taxonomy_v2(), default_prompt_template(), 1),
               Error);
}

TEST(HttpChatProvider, SendsChatRequestWithBearerToken) {
  json seen;
  std::string auth;
  ChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(completion(R"({"cwe": "CWE-1245", "buggy_lines": [1]})"), "application/json");
  });
  setenv("VERICWETY_TEST_KEY", "sekret", 1);
  HttpChatProvider p({"gw", server.url(), "model-x", "VERICWETY_TEST_KEY", 5.0, 0, 0.0});
  auto v = query_provider(p, small_unit("h"), taxonomy_v2(), default_prompt_template());
  EXPECT_EQ(v.module_label->value, "CWE-1245");
  EXPECT_EQ(auth, "Bearer sekret");
  EXPECT_EQ(seen.at("model"), "model-x");
  EXPECT_EQ(seen.at("temperature"), 0);
  EXPECT_NE(seen.at("messages")[0].at("content").get<std::string>().find("1: module h;"), std::string::npos);
}

TEST(HttpChatProvider, RetriesServerErrorsThenSucceeds) {
  std::atomic<int> calls{0};
  ChatServer server([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(completion(R"({"cwe": "NONE", "buggy_lines": []})"), "application/json");
  });
  HttpChatProvider p({"gw", server.url(), "m", "", 5.0, 1, 0.0});
  EXPECT_NE(p.complete({"d", "x"}).find("NONE"), std::string::npos);
  EXPECT_EQ(calls, 2);
}

TEST(HttpChatProvider, ExhaustedRetriesAbstain) {
  ChatServer server([&](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  HttpChatProvider p({"gw", server.url(), "m", "", 5.0, 0, 0.0});
  auto v = query_provider(p, small_unit("d"), taxonomy_v2(), default_prompt_template());
  EXPECT_TRUE(v.abstained());
}

TEST(HttpChatProvider, UnauthorizedIsAuthError) {
  ChatServer server([&](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  HttpChatProvider p({"gw", server.url(), "m", "", 5.0, 2, 0.0});
  try {
    p.complete({"d", "x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuthError);
  }
}

TEST(HttpChatProvider, MissingKeyVariableIsAuthError) {
  unsetenv("VERICWETY_TEST_ABSENT");
  HttpChatProvider p({"gw", "http://127.0.0.1:1/v1", "m", "VERICWETY_TEST_ABSENT", 1.0, 0, 0.0});
  try {
    p.complete({"d", "x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuthError);
  }
}
