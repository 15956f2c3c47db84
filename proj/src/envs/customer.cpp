#include "psrl/envs/customer.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "psrl/core/errors.hpp"
#include "psrl/llm/template.hpp"

namespace psrl {
namespace {

std::string first_string(const nlohmann::json& record, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = record.find(k);
    if (it != record.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void CustomerServiceSpec::validate() const {
  if (trim(scenario_text).empty()) throw Error("customer scenario text is empty");
  if (trim(true_solution_text).empty()) throw Error("customer solution text is empty");
}

std::vector<CustomerServiceSpec> parse_customer_dataset(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("customer dataset: {}", e.what()));
  }
  if (doc.is_object()) {
    for (auto& [key, value] : doc.items()) {
      if (value.is_array()) {
        doc = value;
        break;
      }
    }
  }
  if (!doc.is_array()) throw ParseError("customer dataset: expected an array of scenarios");
  std::vector<CustomerServiceSpec> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    if (!rec.is_object()) throw ParseError(fmt::format("customer dataset: record {} is not an object", i));
    CustomerServiceSpec spec{first_string(rec, {"scenario", "task", "issue", "description"}),
                             first_string(rec, {"solution", "true_solution", "answer"}), PriorMode::LlmGenerated};
    try {
      spec.validate();
    } catch (const Error& e) {
      throw ParseError(fmt::format("customer dataset record {}: {}", i, e.what()));
    }
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw ParseError("customer dataset has no scenarios");
  return out;
}

std::vector<CustomerServiceSpec> load_customer_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open customer dataset '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_customer_dataset(buf.str());
}

bool judge_says_valid(const std::string& judge_reply) {
  const auto valid = judge_reply.rfind("<VALID>");
  if (valid == std::string::npos) return false;
  const auto invalid = judge_reply.rfind("<NOTVALID>");
  return invalid == std::string::npos || invalid < valid;
}

CustomerTurn customer_env_step(const CustomerServiceSpec& spec, const std::string& agent_message, const ChatFn& chat) {
  const auto& reg = llm::default_registry();
  const std::string sim_system = reg.render("customer.simulator.system",
                                            {{"Solution to sampled dataset issue", spec.true_solution_text},
                                             {"Customer service issue sampled from dataset", spec.scenario_text}});
  CustomerTurn turn;
  turn.customer_reply = chat("customer_sim", sim_system, agent_message);
  if (trim(turn.customer_reply) == "Goal reached") {
    turn.resolved = true;
    return turn;
  }
  const std::string judge_system = reg.render("customer.judge.system",
                                              {{"Solution to sampled dataset issue", spec.true_solution_text},
                                               {"Customer service issue sampled from dataset", spec.scenario_text}});
  turn.resolved = judge_says_valid(chat("judge", judge_system, agent_message));
  return turn;
}

CustomerService::CustomerService(CustomerServiceSpec spec, ChatFn chat) : spec_(std::move(spec)), chat_(std::move(chat)) {
  spec_.validate();
  if (!chat_) throw Error("CustomerService requires a chat backend");
  last_reply_ = spec_.scenario_text;
}

std::string CustomerService::reset(Rng&) { return last_reply_; }

StepOutcome CustomerService::step(const std::string&, const std::string& action, Rng&) {
  if (trim(action).empty()) throw RejectedAction(action, "customer service: empty agent message");
  CustomerTurn turn = customer_env_step(spec_, action, chat_);
  last_reply_ = turn.customer_reply;
  return {turn.resolved ? 1.0 : 0.0, last_reply_, true};
}

std::string CustomerService::describe() const {
  return llm::default_registry().render("customer.description",
                                        {{"Troubleshooting task sampled from dataset", spec_.scenario_text}});
}

}  // namespace psrl
