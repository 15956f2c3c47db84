#include "psrl/llm/chat.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"

namespace psrl::llm {

using nlohmann::json;

const std::vector<std::string>& role_tags() {
  static const std::vector<std::string> tags{
      "posterior_sampler", "sample_policy",   "posterior_updater", "icrl_policy", "reflexion_policy",
      "reflexion_reflector", "icpi_transition", "icpi_reward",      "icpi_rollout", "ids_regret",
      "ids_info",          "customer_sim",    "judge",             "prior_generator"};
  return tags;
}

bool is_role_tag(const std::string& tag) {
  const auto& t = role_tags();
  return std::find(t.begin(), t.end(), tag) != t.end();
}

Prompt Prompt::from_template(const TemplateRegistry& registry, const std::string& id, Bindings bindings) {
  Prompt p;
  p.template_id = id;
  p.text = registry.render(id, bindings);
  p.bindings = std::move(bindings);
  return p;
}

Prompt Prompt::raw(std::string text) {
  Prompt p;
  p.text = std::move(text);
  return p;
}

void ChatRequest::validate() const {
  if (!is_role_tag(role_tag)) throw Error(fmt::format("unknown role tag '{}'", role_tag));
  if (system.text.empty()) throw Error(fmt::format("{}: empty system prompt", role_tag));
  if (user.text.empty()) throw Error(fmt::format("{}: empty user prompt", role_tag));
  if (!(temperature >= 0.0)) throw Error(fmt::format("{}: temperature must be non-negative", role_tag));
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

namespace {

json record_body(const TranscriptRecord& r) {
  return json{{"trial", r.trial},
              {"episode", r.episode},
              {"timestep", r.timestep},
              {"role_tag", r.role_tag},
              {"model", r.model},
              {"temperature", r.temperature},
              {"system_template", r.system_template},
              {"system_bindings", r.system_bindings},
              {"system", r.system},
              {"user_template", r.user_template},
              {"user_bindings", r.user_bindings},
              {"user", r.user},
              {"response", r.response},
              {"input_tokens", r.input_tokens},
              {"output_tokens", r.output_tokens},
              {"attempt", r.attempt},
              {"error", r.error}};
}

}  // namespace

std::string TranscriptRecord::compute_digest() const { return sha256_hex(record_body(*this).dump()); }

std::string TranscriptRecord::to_json_line() const {
  json j = record_body(*this);
  j["wall_time"] = wall_time;
  j["digest"] = digest;
  return j.dump();
}

TranscriptRecord TranscriptRecord::from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    TranscriptRecord r;
    r.trial = j.at("trial").get<std::size_t>();
    r.episode = j.at("episode").get<std::size_t>();
    r.timestep = j.at("timestep").get<std::size_t>();
    r.role_tag = j.at("role_tag").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.temperature = j.at("temperature").get<double>();
    r.system_template = j.at("system_template").get<std::string>();
    r.system_bindings = j.at("system_bindings").get<Bindings>();
    r.system = j.at("system").get<std::string>();
    r.user_template = j.at("user_template").get<std::string>();
    r.user_bindings = j.at("user_bindings").get<Bindings>();
    r.user = j.at("user").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.input_tokens = j.at("input_tokens").get<std::uint64_t>();
    r.output_tokens = j.at("output_tokens").get<std::uint64_t>();
    r.attempt = j.at("attempt").get<std::size_t>();
    r.error = j.at("error").get<std::string>();
    r.wall_time = j.at("wall_time").get<double>();
    r.digest = j.at("digest").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("bad transcript record: {}", e.what()));
  }
}

JsonlTranscript::JsonlTranscript(std::string path) : path_(std::move(path)) {
  std::ofstream touch(path_, std::ios::app);
  if (!touch) throw Error(fmt::format("cannot open transcript '{}'", path_));
}

void JsonlTranscript::write(const TranscriptRecord& record) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << record.to_json_line() << '\n';
  out.flush();
  if (!out) throw Error(fmt::format("failed writing transcript '{}'", path_));
}

void MemoryTranscript::write(const TranscriptRecord& record) {
  std::lock_guard lock(mutex_);
  records_.push_back(record);
}

std::vector<TranscriptRecord> MemoryTranscript::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<TranscriptRecord> read_transcript(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open transcript '{}'", path));
  std::vector<TranscriptRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(TranscriptRecord::from_json_line(line));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{} line {}: {}", path, n, e.what()));
    }
  }
  return out;
}

double RetryPolicy::backoff(std::size_t failures) const {
  double d = initial_backoff_seconds;
  for (std::size_t i = 1; i < failures; ++i) d *= multiplier;
  return std::min(d, max_backoff_seconds);
}

LlmClient::LlmClient(ChatBackend& backend, ModelSettings models, RetryPolicy retry, TranscriptSink* sink,
                     TokenLedger* ledger, Sleeper sleeper)
    : backend_(backend),
      models_(std::move(models)),
      retry_(retry),
      sink_(sink),
      ledger_(ledger),
      sleeper_(std::move(sleeper)) {
  if (retry_.max_attempts < 1) throw Error("retry policy needs at least one attempt");
  if (!sleeper_) {
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
}

void LlmClient::persist(const ChatRequest& request, const std::string& response, std::uint64_t in, std::uint64_t out,
                        std::size_t attempt, const std::string& error) {
  if (!sink_) return;
  TranscriptRecord r;
  r.trial = trial_;
  r.episode = episode_;
  r.timestep = timestep_;
  r.role_tag = request.role_tag;
  r.model = request.model_name;
  r.temperature = request.temperature;
  r.system_template = request.system.template_id;
  r.system_bindings = request.system.bindings;
  r.system = request.system.text;
  r.user_template = request.user.template_id;
  r.user_bindings = request.user.bindings;
  r.user = request.user.text;
  r.response = response;
  r.input_tokens = in;
  r.output_tokens = out;
  r.attempt = attempt;
  r.error = error;
  r.wall_time = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
  r.digest = r.compute_digest();
  sink_->write(r);
}

ChatExchange LlmClient::complete(ChatRequest request) {
  request.validate();
  if (request.model_name.empty()) {
    auto it = models_.model_per_role.find(request.role_tag);
    request.model_name = it != models_.model_per_role.end() ? it->second : models_.default_model;
  }
  if (models_.omit_temperature_roles.count(request.role_tag)) request.omit_temperature = true;
  ++calls_;

  std::string last_error;
  for (std::size_t attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    try {
      ChatResponse resp = backend_.complete(request);
      ChatExchange ex;
      ex.request = request;
      ex.response_text = std::move(resp.text);
      ex.input_tokens = resp.input_tokens;
      ex.output_tokens = resp.output_tokens;
      ex.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      ex.attempt = attempt;
      persist(request, ex.response_text, ex.input_tokens, ex.output_tokens, attempt, "");
      if (ledger_) ledger_->add(request.role_tag, episode_, ex.input_tokens, ex.output_tokens);
      exchanges_.push_back(ex);
      return ex;
    } catch (const TransientBackendError& e) {
      last_error = e.what();
      persist(request, "", 0, 0, attempt, last_error);
      if (attempt < retry_.max_attempts) sleeper_(retry_.backoff(attempt));
    } catch (const PermanentBackendError& e) {
      persist(request, "", 0, 0, attempt, e.what());
      throw BackendError(fmt::format("{} call failed: {}", request.role_tag, e.what()), exchanges_);
    }
  }
  throw BackendError(fmt::format("{} call failed after {} attempts: {}", request.role_tag, retry_.max_attempts,
                                 last_error),
                     exchanges_);
}

}  // namespace psrl::llm
