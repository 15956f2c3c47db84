#include "psrl/llm/backends.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

namespace psrl::llm {

using nlohmann::json;

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules, Options options) : options_(std::move(options)) {
  for (auto& r : rules) {
    if (r.responses.empty()) throw Error("scripted rule without responses");
    if (!r.role_tag.empty() && !is_role_tag(r.role_tag)) {
      throw Error(fmt::format("scripted rule has unknown role '{}'", r.role_tag));
    }
    std::regex re;
    try {
      re = std::regex(r.pattern);
    } catch (const std::regex_error& e) {
      throw Error(fmt::format("scripted rule pattern '{}' is invalid: {}", r.pattern, e.what()));
    }
    rules_.push_back({std::move(r), std::move(re), 0});
  }
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  const std::string haystack = request.system.text + "\n" + request.user.text;
  std::lock_guard lock(mutex_);
  for (auto& c : rules_) {
    if (!c.rule.role_tag.empty() && c.rule.role_tag != request.role_tag) continue;
    if (!c.rule.pattern.empty() && !std::regex_search(haystack, c.re)) continue;
    const std::string& text = c.rule.responses[c.next % c.rule.responses.size()];
    ++c.next;
    return {text, options_.input_tokens, options_.output_tokens};
  }
  if (options_.default_response) return {*options_.default_response, options_.input_tokens, options_.output_tokens};
  throw PermanentBackendError(fmt::format("no scripted response for role '{}'", request.role_tag));
}

RateLimiter::RateLimiter(double requests_per_minute, double tokens_per_minute)
    : rpm_(requests_per_minute),
      tpm_(tokens_per_minute),
      request_tokens_(requests_per_minute),
      token_tokens_(tokens_per_minute),
      last_(Clock::now()) {
  if (rpm_ < 0 || tpm_ < 0) throw Error("rate limits must be non-negative");
}

void RateLimiter::refill(Clock::time_point now) {
  const double minutes = std::chrono::duration<double>(now - last_).count() / 60.0;
  if (minutes <= 0) return;
  last_ = now;
  request_tokens_ = std::min(rpm_, request_tokens_ + minutes * rpm_);
  token_tokens_ = std::min(tpm_, token_tokens_ + minutes * tpm_);
}

double RateLimiter::wait_seconds(double tokens, Clock::time_point now) {
  std::lock_guard lock(mutex_);
  refill(now);
  double wait = 0.0;
  if (rpm_ > 0 && request_tokens_ < 1.0) wait = std::max(wait, (1.0 - request_tokens_) / rpm_ * 60.0);
  // A request larger than the whole bucket waits for a full bucket.
  const double need = std::min(tokens, tpm_);
  if (tpm_ > 0 && token_tokens_ < need) wait = std::max(wait, (need - token_tokens_) / tpm_ * 60.0);
  return wait;
}

void RateLimiter::acquire(double tokens) {
  while (true) {
    const double wait = wait_seconds(tokens, Clock::now());
    if (wait <= 0) {
      std::lock_guard lock(mutex_);
      refill(Clock::now());
      if (rpm_ > 0) request_tokens_ -= 1.0;
      if (tpm_ > 0) token_tokens_ -= std::min(tokens, tpm_);
      return;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

OpenAiBackend::OpenAiBackend(OpenAiSettings settings, std::shared_ptr<RateLimiter> limiter)
    : settings_(std::move(settings)), limiter_(std::move(limiter)) {
  const std::string& url = settings_.base_url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(fmt::format("base_url '{}' has no scheme", url));
  const std::size_t path_start = url.find('/', scheme_end + 3);
  scheme_host_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!settings_.api_key_env.empty()) {
    if (const char* key = std::getenv(settings_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string OpenAiBackend::request_body(const ChatRequest& request, const std::optional<std::uint64_t>& max_tokens) {
  json body{{"model", request.model_name},
            {"messages",
             json::array({json{{"role", "system"}, {"content", request.system.text}},
                          json{{"role", "user"}, {"content", request.user.text}}})}};
  if (!request.omit_temperature) body["temperature"] = request.temperature;
  if (max_tokens) body["max_tokens"] = *max_tokens;
  return body.dump();
}

ChatResponse OpenAiBackend::parse_response_body(const std::string& body) {
  try {
    const json j = json::parse(body);
    ChatResponse r;
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      r.input_tokens = j["usage"].value("prompt_tokens", std::uint64_t{0});
      r.output_tokens = j["usage"].value("completion_tokens", std::uint64_t{0});
    }
    return r;
  } catch (const json::exception& e) {
    throw TransientBackendError(fmt::format("malformed chat-completions response: {}", e.what()));
  }
}

ChatResponse OpenAiBackend::complete(const ChatRequest& request) {
  if (limiter_) {
    const double estimate =
        static_cast<double>(request.system.text.size() + request.user.text.size()) / settings_.chars_per_token +
        static_cast<double>(settings_.max_tokens.value_or(0));
    limiter_->acquire(estimate);
  }
  httplib::Client client(scheme_host_);
  const auto secs = static_cast<time_t>(settings_.timeout_seconds);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  client.set_connection_timeout(std::min<time_t>(secs, 30), 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, request_body(request, settings_.max_tokens),
                         "application/json");
  if (!res) {
    throw TransientBackendError(fmt::format("transport error: {}", httplib::to_string(res.error())));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientBackendError(fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200)));
  }
  if (res->status != 200) {
    throw PermanentBackendError(fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200)));
  }
  return parse_response_body(res->body);
}

}  // namespace psrl::llm
