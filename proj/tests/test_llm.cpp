#include <atomic>
#include <fstream>
#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "malltwin/errors.hpp"
#include "malltwin/llm.hpp"
#include "malltwin/prompts.hpp"
#include "test_support.hpp"

using namespace malltwin;
using malltwin::testing::shipped_config;
using malltwin::testing::TempDir;

namespace {

// Canned replies: counts for population prompts, a fixed spread for distribution prompts.
std::string canned_reply(const ScenarioConfig& c, const std::string& prompt) {
  std::string out;
  if (prompt.find("[group name]") != std::string::npos) {
    int n = 10;
    for (const auto& g : c.groups) out += g.name + ": " + std::to_string(n++) + "; because\n";
  } else {
    int w = 1;
    for (const auto& s : c.mall.stores) out += s.name + ": " + std::to_string(w++) + "; because\n";
  }
  return out;
}

class FakeBackend : public ChatBackend {
public:
  FakeBackend(const ScenarioConfig& c, int* calls) : config_(c), calls_(calls) {}
  std::string complete(const std::string&, const std::string& prompt, double) override {
    ++*calls_;
    return canned_reply(config_, prompt);
  }

private:
  const ScenarioConfig& config_;
  int* calls_;
};

// A chat-completion endpoint on localhost.
struct FakeServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> requests{0};
  std::atomic<int> fail_first{0};
  std::string last_auth;

  explicit FakeServer(const ScenarioConfig& c) {
    server.Post("/v1/chat/completions", [this, &c](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      if (fail_first > 0) {
        --fail_first;
        res.status = 503;
        return;
      }
      last_auth = req.get_header_value("Authorization");
      const auto body = nlohmann::json::parse(req.body);
      const std::string prompt = body.at("messages").at(0).at("content");
      nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", canned_reply(c, prompt)}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

}  // namespace

TEST_CASE("cache key hashes model and prompt") {
  const auto k = ResponseCache::key("m", "p");
  CHECK(k.size() == 64);
  CHECK(k == ResponseCache::key("m", "p"));
  CHECK(k != ResponseCache::key("m2", "p"));
  CHECK(k != ResponseCache::key("m", "p2"));
  // sha256("m\np")
  CHECK(k == "de175578803a8298acb0a6cd3de3d48cf36c8a97b33c96634e381cdba8313919");
}

TEST_CASE("cache stores and looks up responses") {
  TempDir dir("cache");
  ResponseCache cache(dir.path / "c");
  CHECK_FALSE(cache.lookup("m", "p").has_value());
  cache.store("m", "p", "hello");
  CHECK(cache.lookup("m", "p").value() == "hello");
  CHECK(cache.size() == 1);
  const auto file = dir.path / "c" / (ResponseCache::key("m", "p") + ".json");
  REQUIRE(std::filesystem::exists(file));
  const auto j = nlohmann::json::parse(std::ifstream(file));
  CHECK(j.at("model") == "m");
  CHECK(j.at("prompt") == "p");
  CHECK(j.at("response") == "hello");
  CHECK(j.contains("timestamp"));
}

TEST_CASE("chat wire format") {
  const auto body = nlohmann::json::parse(HttpChatBackend::request_body("gpt-x", "hi", 0.0));
  CHECK(body.at("model") == "gpt-x");
  CHECK(body.at("messages").at(0).at("role") == "user");
  CHECK(body.at("messages").at(0).at("content") == "hi");
  CHECK(body.at("temperature") == 0.0);
  CHECK(HttpChatBackend::extract_reply(R"({"choices":[{"message":{"content":"yo"}}]})") == "yo");
  CHECK_THROWS_AS(HttpChatBackend::extract_reply("{}"), ParseError);
  CHECK_THROWS_AS(HttpChatBackend::extract_reply("not json"), ParseError);
}

TEST_CASE("LLM day: one count and one distribution prompt per group at every checkpoint") {
  auto c = shipped_config();
  TempDir dir("llmday");
  c.llm.cache_dir = dir.path;
  int calls = 0;
  const BackendFactory factory = [&](const LlmClientConfig&, const std::string&) {
    return std::make_unique<FakeBackend>(c, &calls);
  };
  ::setenv("MALLTWIN_TEST_KEY", "k", 1);
  c.llm.api_key_env_var = "MALLTWIN_TEST_KEY";

  CachedChatClient client(c.llm, "day-a", factory);
  const auto day = generate_day_llm(c, client, {}, "day-a");
  const auto expected = 20 * (1 + c.groups.size());
  CHECK(client.cache().size() == expected);
  CHECK(client.cache_misses() == static_cast<int>(expected));
  CHECK(calls == static_cast<int>(expected));
  CHECK_NOTHROW(day.validate(c));
  CHECK(day.source == "llm");

  // Warm cache: no backend, no key, identical schedule, no new entries.
  ::unsetenv("MALLTWIN_TEST_KEY");
  CachedChatClient warm(c.llm, "day-a", factory);
  const auto again = generate_day_llm(c, warm, {}, "day-a");
  CHECK(again == day);
  CHECK(schedule_to_json(again) == schedule_to_json(day));
  CHECK(warm.cache_hits() == static_cast<int>(expected));
  CHECK(warm.cache_misses() == 0);
  CHECK(warm.cache().size() == expected);
  CHECK(calls == static_cast<int>(expected));
}

TEST_CASE("cold cache without API key is a config error naming the variable") {
  auto c = shipped_config();
  TempDir dir("nokey");
  c.llm.cache_dir = dir.path;
  c.llm.api_key_env_var = "MALLTWIN_SURELY_UNSET_KEY";
  ::unsetenv("MALLTWIN_SURELY_UNSET_KEY");
  CachedChatClient client(c.llm, "d");
  try {
    generate_day_llm(c, client, {}, "d");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("MALLTWIN_SURELY_UNSET_KEY") != std::string::npos);
  }
}

TEST_CASE("HTTP backend against a local endpoint, with retries") {
  auto c = shipped_config();
  FakeServer server(c);
  TempDir dir("http");
  c.llm.cache_dir = dir.path;
  c.llm.endpoint_url = server.url();
  c.llm.api_key_env_var = "MALLTWIN_TEST_HTTP_KEY";
  c.llm.max_retries = 2;
  ::setenv("MALLTWIN_TEST_HTTP_KEY", "secret", 1);

  server.fail_first = 2;
  CachedChatClient client(c.llm, "h");
  const auto prompt = build_population_prompt(c.mall, c.groups, TimeOfDay::from_hm(10, 0));
  const auto reply = client.ask(prompt);
  CHECK(reply == canned_reply(c, prompt));
  CHECK(server.requests == 3);
  CHECK(server.last_auth == "Bearer secret");
  CHECK(client.ask(prompt) == reply);
  CHECK(server.requests == 3);

  server.fail_first = 10;
  CHECK_THROWS_AS(client.ask("another prompt"), NetworkError);
  ::unsetenv("MALLTWIN_TEST_HTTP_KEY");
}

TEST_CASE("unreachable endpoint is a network error") {
  auto c = shipped_config();
  TempDir dir("down");
  c.llm.cache_dir = dir.path;
  c.llm.endpoint_url = "http://127.0.0.1:9/v1/chat/completions";
  c.llm.max_retries = 0;
  c.llm.timeout_s = 2;
  c.llm.api_key_env_var = "MALLTWIN_TEST_DOWN_KEY";
  ::setenv("MALLTWIN_TEST_DOWN_KEY", "x", 1);
  CachedChatClient client(c.llm, "x");
  CHECK_THROWS_AS(client.ask("p"), NetworkError);
  ::unsetenv("MALLTWIN_TEST_DOWN_KEY");
}
