#pragma once

#include <stdexcept>
#include <string>

namespace malltwin {

// Invalid configuration, dataset or argument. The message names the field.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed JSON or an unusable LLM response.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Transport failure talking to the chat-completion endpoint.
class NetworkError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A trained model does not fit the topology or observation encoding it is used with.
class MismatchError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace malltwin
