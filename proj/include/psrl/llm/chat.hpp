#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psrl/core/errors.hpp"
#include "psrl/llm/template.hpp"
#include "psrl/metrics/metrics.hpp"

namespace psrl::llm {

// Every role a chat request may carry.
const std::vector<std::string>& role_tags();
bool is_role_tag(const std::string& tag);

// Rendered prompt text plus what it was rendered from. A raw prompt has an
// empty template_id and no bindings.
struct Prompt {
  std::string template_id;
  Bindings bindings;
  std::string text;

  static Prompt from_template(const TemplateRegistry& registry, const std::string& id, Bindings bindings);
  static Prompt raw(std::string text);
};

struct ChatRequest {
  std::string role_tag;
  Prompt system;
  Prompt user;
  double temperature = 1.0;
  std::string model_name;  // filled in by LlmClient when empty
  bool omit_temperature = false;

  void validate() const;
};

struct ChatResponse {
  std::string text;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
};

struct ChatExchange {
  ChatRequest request;
  std::string response_text;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  double latency_seconds = 0.0;
  std::size_t attempt = 1;
};

// Retryable failure: transport error, 429/5xx, or a malformed wire response.
class TransientBackendError : public Error {
 public:
  using Error::Error;
};

// Non-retryable failure, e.g. a 4xx other than 429.
class PermanentBackendError : public Error {
 public:
  using Error::Error;
};

// A call that could not be completed. Carries every exchange the client had
// recorded before the failure.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::vector<ChatExchange> partial)
      : Error(what), partial_(std::move(partial)) {}
  const std::vector<ChatExchange>& partial_transcript() const { return partial_; }

 private:
  std::vector<ChatExchange> partial_;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string name() const = 0;
  // May be called concurrently.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct TranscriptRecord {
  std::size_t trial = 0;
  std::size_t episode = 0;
  std::size_t timestep = 0;
  std::string role_tag;
  std::string model;
  double temperature = 0.0;
  std::string system_template;
  Bindings system_bindings;
  std::string system;
  std::string user_template;
  Bindings user_bindings;
  std::string user;
  std::string response;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::size_t attempt = 1;
  double wall_time = 0.0;
  std::string error;  // non-empty for failed attempts
  std::string digest;

  // SHA-256 over every field except wall_time and digest.
  std::string compute_digest() const;
  std::string to_json_line() const;
  static TranscriptRecord from_json_line(const std::string& line);
};

std::string sha256_hex(const std::string& data);

class TranscriptSink {
 public:
  virtual ~TranscriptSink() = default;
  virtual void write(const TranscriptRecord& record) = 0;
};

// Append-only JSON lines; writes are serialized and flushed per record.
class JsonlTranscript : public TranscriptSink {
 public:
  explicit JsonlTranscript(std::string path);
  void write(const TranscriptRecord& record) override;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mutex_;
};

class MemoryTranscript : public TranscriptSink {
 public:
  void write(const TranscriptRecord& record) override;
  std::vector<TranscriptRecord> records() const;

 private:
  mutable std::mutex mutex_;
  std::vector<TranscriptRecord> records_;
};

std::vector<TranscriptRecord> read_transcript(const std::string& path);

struct RetryPolicy {
  std::size_t max_attempts = 4;
  double initial_backoff_seconds = 1.0;
  double multiplier = 2.0;
  double max_backoff_seconds = 30.0;

  // Delay before attempt n+1 after n failures (n >= 1).
  double backoff(std::size_t failures) const;
};

struct ModelSettings {
  std::string default_model = "scripted";
  std::map<std::string, std::string> model_per_role;
  std::set<std::string> omit_temperature_roles;
};

// Wraps a backend with retries, model/temperature policy, token accounting
// and transcript persistence. One client per trial.
class LlmClient {
 public:
  using Sleeper = std::function<void(double seconds)>;

  LlmClient(ChatBackend& backend, ModelSettings models = {}, RetryPolicy retry = {}, TranscriptSink* sink = nullptr,
            TokenLedger* ledger = nullptr, Sleeper sleeper = {});

  void set_trial(std::size_t trial) { trial_ = trial; }
  void set_position(std::size_t episode, std::size_t timestep) {
    episode_ = episode;
    timestep_ = timestep;
  }

  // Persists the exchange before returning. Throws BackendError after the
  // retry budget is spent or on a permanent failure.
  ChatExchange complete(ChatRequest request);

  std::size_t calls() const { return calls_; }
  const std::vector<ChatExchange>& exchanges() const { return exchanges_; }

 private:
  void persist(const ChatRequest& request, const std::string& response, std::uint64_t in, std::uint64_t out,
               std::size_t attempt, const std::string& error);

  ChatBackend& backend_;
  ModelSettings models_;
  RetryPolicy retry_;
  TranscriptSink* sink_;
  TokenLedger* ledger_;
  Sleeper sleeper_;
  std::size_t trial_ = 0;
  std::size_t episode_ = 0;
  std::size_t timestep_ = 0;
  std::size_t calls_ = 0;
  std::vector<ChatExchange> exchanges_;
};

}  // namespace psrl::llm
