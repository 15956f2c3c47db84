#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psrl/core/environment.hpp"

namespace psrl {

enum class PriorMode { LlmGenerated, WellSpecified };

struct CustomerServiceSpec {
  std::string scenario_text;
  std::string true_solution_text;
  PriorMode prior_mode = PriorMode::LlmGenerated;

  void validate() const;
};

// Reads the scenario dataset: a JSON array, or an object holding one array
// (under any key). Scenario text comes from the first of scenario, task,
// issue, description; the solution from solution, true_solution, answer.
// Other fields are ignored.
std::vector<CustomerServiceSpec> parse_customer_dataset(const std::string& json_text);
std::vector<CustomerServiceSpec> load_customer_dataset(const std::string& path);

// (role_tag, system prompt, user prompt) -> response text.
using ChatFn = std::function<std::string(const std::string&, const std::string&, const std::string&)>;

struct CustomerTurn {
  std::string customer_reply;
  bool resolved = false;
};

// Asks the customer simulator, then the judge unless the customer already
// replied with exactly "Goal reached".
CustomerTurn customer_env_step(const CustomerServiceSpec& spec, const std::string& agent_message, const ChatFn& chat);

// True iff the judge reply contains <VALID> (and the last verdict tag is not
// <NOTVALID>).
bool judge_says_valid(const std::string& judge_reply);

// Each period is one episode of horizon 1 whose action is a free-text agent
// message; the state is the customer's latest reply.
class CustomerService : public Environment {
 public:
  CustomerService(CustomerServiceSpec spec, ChatFn chat);

  std::string id() const override { return "customer"; }
  std::string reset(Rng& rng) override;
  StepOutcome step(const std::string& state, const std::string& action, Rng& rng) override;
  std::vector<std::string> action_set(const std::string&) const override { return {}; }
  std::string describe() const override;
  double informed_optimal_value() const override { return 1.0; }

  const CustomerServiceSpec& spec() const { return spec_; }

 private:
  CustomerServiceSpec spec_;
  ChatFn chat_;
  std::string last_reply_;
};

}  // namespace psrl
