#include "malltwin/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "malltwin/errors.hpp"
#include "malltwin/hashing.hpp"
#include "malltwin/io.hpp"
#include "malltwin/prompts.hpp"

namespace malltwin {

using nlohmann::json;

HttpChatBackend::HttpChatBackend(std::string endpoint_url, std::string api_key, double timeout_s)
    : api_key_(std::move(api_key)), timeout_s_(timeout_s) {
  const auto scheme_end = endpoint_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("llm.endpoint_url must include a scheme: " + endpoint_url);
  const auto path_start = endpoint_url.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint_url.substr(path_start);
}

std::string HttpChatBackend::request_body(const std::string& model, const std::string& prompt, double temperature) {
  const json body = {
      {"model", model},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature},
  };
  return body.dump();
}

std::string HttpChatBackend::extract_reply(const std::string& response_body) {
  try {
    const json j = json::parse(response_body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected chat-completion response: ") + e.what());
  }
}

std::string HttpChatBackend::complete(const std::string& model, const std::string& prompt, double temperature) {
  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(timeout_s_);
  const auto usecs = static_cast<time_t>((timeout_s_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_, headers, request_body(model, prompt, temperature), "application/json");
  if (!res) {
    throw NetworkError("request to " + scheme_host_port_ + path_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw NetworkError("chat endpoint returned HTTP " + std::to_string(res->status));
  }
  return extract_reply(res->body);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ResponseCache::key(const std::string& model, const std::string& prompt) {
  return sha256_hex(model + "\n" + prompt);
}

std::optional<std::string> ResponseCache::lookup(const std::string& model, const std::string& prompt) const {
  const auto path = dir_ / (key(model, prompt) + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const json j = json::parse(read_text_file(path));
    if (j.at("model").get<std::string>() != model || j.at("prompt").get<std::string>() != prompt) {
      return std::nullopt;
    }
    return j.at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError("corrupt cache entry '" + path.string() + "': " + e.what());
  }
}

void ResponseCache::store(const std::string& model, const std::string& prompt, const std::string& response) {
  const json j = {
      {"model", model},
      {"prompt", prompt},
      {"response", response},
      {"timestamp", static_cast<long long>(std::time(nullptr))},
  };
  std::lock_guard lock(write_mutex_);
  write_text_file_atomic(dir_ / (key(model, prompt) + ".json"), j.dump(2) + "\n");
}

std::size_t ResponseCache::size() const {
  if (!std::filesystem::is_directory(dir_)) return 0;
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    if (e.is_regular_file() && e.path().extension() == ".json") ++n;
  }
  return n;
}

CachedChatClient::CachedChatClient(LlmClientConfig config, std::string label, BackendFactory factory)
    : config_(std::move(config)),
      cache_(label.empty() ? config_.cache_dir : config_.cache_dir / label),
      factory_(std::move(factory)) {
  if (!factory_) {
    factory_ = [](const LlmClientConfig& c, const std::string& api_key) -> std::unique_ptr<ChatBackend> {
      return std::make_unique<HttpChatBackend>(c.endpoint_url, api_key, c.timeout_s);
    };
  }
}

ChatBackend& CachedChatClient::backend() {
  if (!backend_) {
    const char* key = std::getenv(config_.api_key_env_var.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("LLM cache miss and no API key: set environment variable " + config_.api_key_env_var);
    }
    backend_ = factory_(config_, key);
  }
  return *backend_;
}

std::string CachedChatClient::ask(const std::string& prompt) {
  if (auto cached = cache_.lookup(config_.model_name, prompt)) {
    ++hits_;
    return *cached;
  }
  auto& chat = backend();
  for (int attempt = 0;; ++attempt) {
    try {
      std::string reply = chat.complete(config_.model_name, prompt, config_.sampling_temperature);
      cache_.store(config_.model_name, prompt, reply);
      ++misses_;
      return reply;
    } catch (const NetworkError&) {
      if (attempt >= config_.max_retries) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << std::min(attempt, 6)));
    }
  }
}

DaySchedule generate_day_llm(const ScenarioConfig& config, CachedChatClient& client, const IndoorTrace& indoor_trace,
                             const std::string& day_id, std::vector<std::string>* warnings) {
  DaySchedule day;
  day.day_id = day_id;
  day.source = "llm";
  const auto note = [&](const std::string& at, const std::vector<std::string>& ws) {
    if (warnings == nullptr) return;
    for (const auto& w : ws) warnings->push_back(day_id + " " + at + ": " + w);
  };
  const auto& model = client.config().model_name;

  for (const TimeOfDay t : checkpoints(config.mall)) {
    CheckpointEntry entry;
    entry.time = t;

    const auto count_prompt = build_population_prompt(config.mall, config.groups, t);
    try {
      auto parsed = parse_count_response(client.ask(count_prompt), config.groups);
      note(t.str(), parsed.warnings);
      entry.group_counts = std::move(parsed.counts);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " (prompt " + ResponseCache::key(model, count_prompt) + ")");
    }

    const auto it = indoor_trace.find(t);
    const double indoor = it == indoor_trace.end() ? kDefaultIndoorTempC : it->second;
    for (const auto& group : config.groups) {
      const auto prompt = build_distribution_prompt(config.mall, group, t, indoor);
      try {
        auto parsed = parse_distribution_response(client.ask(prompt), config.mall.stores);
        note(t.str() + " " + group.name, parsed.warnings);
        entry.group_distributions[group.name] = std::move(parsed.shares);
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (prompt " + ResponseCache::key(model, prompt) + ")");
      }
    }
    day.entries.push_back(std::move(entry));
  }
  return day;
}

}  // namespace malltwin
