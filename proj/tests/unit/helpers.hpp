#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "psrl/core/environment.hpp"

namespace psrl::test {

// Plays a fixed action list, cycling when it runs out.
class SequenceAgent : public Agent {
 public:
  explicit SequenceAgent(std::vector<std::string> actions) : actions_(std::move(actions)) {}
  std::string name() const override { return "sequence"; }
  void begin_episode(std::size_t) override { ++begun; }
  std::string select_action(const std::string&, std::size_t) override { return actions_[next_++ % actions_.size()]; }
  void end_episode(const Trajectory& t) override { ended.push_back(t); }

  int begun = 0;
  std::vector<Trajectory> ended;

 private:
  std::vector<std::string> actions_;
  std::size_t next_ = 0;
};

// Decides from the state label.
class FunctionAgent : public Agent {
 public:
  explicit FunctionAgent(std::function<std::string(const std::string&, std::size_t)> f) : f_(std::move(f)) {}
  std::string name() const override { return "function"; }
  void begin_episode(std::size_t) override {}
  std::string select_action(const std::string& s, std::size_t h) override { return f_(s, h); }
  void end_episode(const Trajectory&) override {}

 private:
  std::function<std::string(const std::string&, std::size_t)> f_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace psrl::test
