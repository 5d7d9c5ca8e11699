#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "malltwin/config.hpp"
#include "malltwin/schedule.hpp"

namespace malltwin {

// Anything that answers a single-turn chat prompt.
class ChatBackend {
public:
  virtual ~ChatBackend() = default;
  // Throws NetworkError on transport failure.
  virtual std::string complete(const std::string& model, const std::string& prompt, double temperature) = 0;
};

// OpenAI-style chat-completion endpoint: POST {model, messages, temperature},
// reply text taken from choices[0].message.content.
class HttpChatBackend : public ChatBackend {
public:
  HttpChatBackend(std::string endpoint_url, std::string api_key, double timeout_s);
  std::string complete(const std::string& model, const std::string& prompt, double temperature) override;

  static std::string request_body(const std::string& model, const std::string& prompt, double temperature);
  // Throws ParseError when the body is not a chat-completion response.
  static std::string extract_reply(const std::string& response_body);

private:
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  double timeout_s_;
};

// One JSON file per request, named by the hex hash of (model, prompt).
// Many readers, one writer at a time.
class ResponseCache {
public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string key(const std::string& model, const std::string& prompt);

  std::optional<std::string> lookup(const std::string& model, const std::string& prompt) const;
  void store(const std::string& model, const std::string& prompt, const std::string& response);
  std::size_t size() const;
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  mutable std::mutex write_mutex_;
};

using BackendFactory = std::function<std::unique_ptr<ChatBackend>(const LlmClientConfig&, const std::string& api_key)>;

// Cache-first client. The backend is only created on the first cache miss,
// so a warm cache needs neither network nor API key.
class CachedChatClient {
public:
  // `label` selects a cache namespace (one per generated day).
  CachedChatClient(LlmClientConfig config, std::string label, BackendFactory factory = {});

  std::string ask(const std::string& prompt);

  int cache_hits() const { return hits_; }
  int cache_misses() const { return misses_; }
  const ResponseCache& cache() const { return cache_; }
  const LlmClientConfig& config() const { return config_; }

private:
  ChatBackend& backend();

  LlmClientConfig config_;
  ResponseCache cache_;
  BackendFactory factory_;
  std::unique_ptr<ChatBackend> backend_;
  int hits_ = 0;
  int misses_ = 0;
};

// Indoor temperature per checkpoint; checkpoints not present read as 25 degC.
using IndoorTrace = std::map<TimeOfDay, double>;

inline constexpr double kDefaultIndoorTempC = 25.0;

// Per checkpoint: one population prompt, then one distribution prompt per group.
DaySchedule generate_day_llm(const ScenarioConfig& config, CachedChatClient& client, const IndoorTrace& indoor_trace,
                             const std::string& day_id, std::vector<std::string>* warnings = nullptr);

}  // namespace malltwin
