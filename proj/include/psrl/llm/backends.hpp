#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <regex>
#include <string>
#include <vector>

#include "psrl/llm/chat.hpp"

namespace psrl::llm {

// Canned responses keyed by role and a regex searched in "system\nuser".
// Rules are tried in order; a rule's responses are served in rotation.
struct ScriptRule {
  std::string role_tag;  // empty matches any role
  std::string pattern;   // ECMAScript regex; empty matches anything
  std::vector<std::string> responses;
};

class ScriptedBackend : public ChatBackend {
 public:
  struct Options {
    std::uint64_t input_tokens = 100;
    std::uint64_t output_tokens = 50;
    std::optional<std::string> default_response;
  };

  ScriptedBackend(std::vector<ScriptRule> rules, Options options);
  explicit ScriptedBackend(std::vector<ScriptRule> rules) : ScriptedBackend(std::move(rules), Options{}) {}
  std::string name() const override { return "scripted"; }
  // Throws PermanentBackendError when no rule matches and no default is set.
  ChatResponse complete(const ChatRequest& request) override;

 private:
  struct Compiled {
    ScriptRule rule;
    std::regex re;
    std::size_t next = 0;
  };
  std::vector<Compiled> rules_;
  Options options_;
  std::mutex mutex_;
};

class FunctionBackend : public ChatBackend {
 public:
  using Fn = std::function<ChatResponse(const ChatRequest&)>;
  explicit FunctionBackend(Fn fn, std::string name = "function") : fn_(std::move(fn)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  ChatResponse complete(const ChatRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
  std::string name_;
};

// Token bucket over requests and tokens per minute; zero disables a limit.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  RateLimiter(double requests_per_minute, double tokens_per_minute);
  // Blocks until one request carrying `tokens` fits both buckets.
  void acquire(double tokens);
  // Seconds to wait at `now` before `tokens` would fit; consumes nothing.
  double wait_seconds(double tokens, Clock::time_point now);

 private:
  void refill(Clock::time_point now);

  double rpm_;
  double tpm_;
  double request_tokens_;
  double token_tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

struct OpenAiSettings {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::optional<std::uint64_t> max_tokens;
  double timeout_seconds = 120.0;
  // Rough prompt size used for the token bucket before usage is known.
  double chars_per_token = 4.0;
};

// OpenAI-compatible chat completions over HTTP(S).
class OpenAiBackend : public ChatBackend {
 public:
  OpenAiBackend(OpenAiSettings settings, std::shared_ptr<RateLimiter> limiter = nullptr);
  std::string name() const override { return "openai"; }
  ChatResponse complete(const ChatRequest& request) override;

  // The JSON body sent for `request`.
  static std::string request_body(const ChatRequest& request, const std::optional<std::uint64_t>& max_tokens);
  // Parses a chat-completions response; throws TransientBackendError if malformed.
  static ChatResponse parse_response_body(const std::string& body);

 private:
  OpenAiSettings settings_;
  std::shared_ptr<RateLimiter> limiter_;
  std::string scheme_host_;
  std::string path_prefix_;
  std::string api_key_;
};

}  // namespace psrl::llm
