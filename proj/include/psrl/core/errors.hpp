#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace psrl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An agent emitted an action label the environment does not accept.
class RejectedAction : public Error {
 public:
  RejectedAction(std::string label, const std::string& what)
      : Error(what), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// An observation fell outside the support of a prior.
class MisspecificationError : public Error {
 public:
  using Error::Error;
};

// A search exhausted its configured node budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Aggregates every problem found while validating a configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace psrl
