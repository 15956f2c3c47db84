#include "psrl/planning/lock_planner.hpp"

#include <algorithm>
#include <bit>

#include <fmt/format.h>

#include "psrl/core/errors.hpp"

namespace psrl {
namespace {

constexpr std::size_t kFeedbacks = 3;

std::size_t feedback_index(Feedback f) { return static_cast<std::size_t>(f); }

std::uint64_t saturating_pow3(std::size_t exponent, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exponent && v < cap; ++i) v *= 3;
  return std::min(v, cap);
}

}  // namespace

std::vector<std::string> LockGame::all_codes() const {
  if (alphabet_size < 1 || alphabet_size > 10 || length < 1 || length > alphabet_size) {
    throw Error("LockGame: need 1 <= length <= alphabet_size <= 10");
  }
  std::vector<std::string> out;
  std::string code(length, '0');
  auto rec = [&](auto&& self, std::size_t pos, std::uint32_t used) -> void {
    if (pos == length) {
      out.push_back(code);
      return;
    }
    for (std::size_t d = 0; d < alphabet_size; ++d) {
      if (used & (1u << d)) continue;
      code[pos] = static_cast<char>('0' + d);
      self(self, pos + 1, used | (1u << d));
    }
  };
  rec(rec, 0, 0);
  return out;
}

LockBelief LockBelief::uniform(const LockGame& game) { return {game.all_codes()}; }

void LockBelief::refine(std::size_t position, char digit, Feedback feedback) {
  std::erase_if(consistent_codes, [&](const std::string& c) { return classify(c, position, digit) != feedback; });
}

std::size_t LockPlanner::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ (std::uint64_t{k.position} << 1) ^ (std::uint64_t{k.episodes_left} << 9) ^
                    std::uint64_t{k.alive};
  for (std::uint64_t w : k.bits) {
    h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

LockPlanner::LockPlanner(LockGame game, std::size_t node_budget)
    : game_(game), node_budget_(node_budget), codes_(game.all_codes()) {
  if (codes_.size() > kWords * 64) throw Error("LockPlanner: too many codes for the belief bitset");
  for (std::size_t i = 0; i < codes_.size(); ++i) index_[codes_[i]] = i;
  const std::size_t m = game_.alphabet_size;
  masks_.assign(game_.length * m * kFeedbacks, Bits{});
  present_.assign(m, Bits{});
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    for (std::size_t d = 0; d < m; ++d) {
      const char digit = static_cast<char>('0' + d);
      if (codes_[i].find(digit) != std::string::npos) present_[d][i / 64] |= bit;
      for (std::size_t p = 0; p < game_.length; ++p) {
        masks_[(p * m + d) * kFeedbacks + feedback_index(classify(codes_[i], p, digit))][i / 64] |= bit;
      }
    }
  }
}

LockPlanner::Bits LockPlanner::to_bits(const LockBelief& belief) const {
  Bits b{};
  for (const auto& c : belief.consistent_codes) {
    auto it = index_.find(c);
    if (it == index_.end()) throw Error(fmt::format("LockPlanner: '{}' is not a legal code", c));
    b[it->second / 64] |= std::uint64_t{1} << (it->second % 64);
  }
  return b;
}

std::uint64_t LockPlanner::upper_bound(std::size_t count, std::size_t position, std::size_t episodes_left,
                                       bool alive) const {
  // At most one code can be solved along the all-correct path of the current
  // episode, and at most one per distinct feedback history in later ones.
  std::uint64_t bound = alive ? 1 : 0;
  const std::size_t remaining = game_.length - position;
  for (std::size_t j = 1; j < episodes_left; ++j) {
    bound += saturating_pow3(remaining + game_.length * (j - 1), count);
  }
  return bound;
}

LockPlanner::Entry LockPlanner::solve(const Bits& b, std::size_t position, std::size_t episodes_left, bool alive,
                                      std::uint32_t entered_mask) {
  std::size_t count = 0;
  for (std::uint64_t w : b) count += static_cast<std::size_t>(std::popcount(w));
  if (count == 1) {
    std::size_t idx = 0;
    for (std::size_t w = 0; w < kWords; ++w) {
      if (b[w]) {
        idx = w * 64 + static_cast<std::size_t>(std::countr_zero(b[w]));
        break;
      }
    }
    return {(alive ? 1u : 0u) + (episodes_left - 1), codes_[idx][position]};
  }

  const Key key{b, static_cast<std::uint8_t>(position), static_cast<std::uint8_t>(episodes_left), alive};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  if (memo_.size() >= node_budget_) {
    throw BudgetExceeded(fmt::format("lock planner exceeded its node budget of {}; raise node_budget", node_budget_));
  }

  const std::size_t m = game_.alphabet_size;
  auto intersects = [&](const Bits& mask) {
    for (std::size_t w = 0; w < kWords; ++w)
      if (b[w] & mask[w]) return true;
    return false;
  };

  std::vector<std::size_t> consistent_here;
  std::vector<std::size_t> elsewhere;
  bool fresh_taken = false;
  for (std::size_t d = 0; d < m; ++d) {
    if (!intersects(present_[d])) continue;
    const bool fresh = !(entered_mask & (1u << d));
    if (fresh) {
      if (fresh_taken) continue;
      fresh_taken = true;
    }
    const auto& correct = masks_[(position * m + d) * kFeedbacks + feedback_index(Feedback::CorrectPosition)];
    (intersects(correct) ? consistent_here : elsewhere).push_back(d);
  }
  consistent_here.insert(consistent_here.end(), elsewhere.begin(), elsewhere.end());

  const bool last = position + 1 == game_.length;
  std::int64_t best = -1;
  char best_digit = '0';
  for (std::size_t d : consistent_here) {
    Bits child[kFeedbacks];
    std::size_t child_count[kFeedbacks];
    for (std::size_t f = 0; f < kFeedbacks; ++f) {
      const auto& mask = masks_[(position * m + d) * kFeedbacks + f];
      child_count[f] = 0;
      for (std::size_t w = 0; w < kWords; ++w) {
        child[f][w] = b[w] & mask[w];
        child_count[f] += static_cast<std::size_t>(std::popcount(child[f][w]));
      }
    }
    const std::size_t correct = feedback_index(Feedback::CorrectPosition);
    const std::uint64_t immediate = (last && alive) ? child_count[correct] : 0;

    auto child_state = [&](std::size_t f, std::size_t& p, std::size_t& k, bool& a) {
      if (!last) {
        p = position + 1;
        k = episodes_left;
        a = alive && f == correct;
      } else {
        p = 0;
        k = episodes_left - 1;
        a = true;
      }
    };

    std::uint64_t bound = immediate;
    for (std::size_t f = 0; f < kFeedbacks; ++f) {
      if (!child_count[f]) continue;
      std::size_t p = 0, k = 0;
      bool a = false;
      child_state(f, p, k, a);
      if (k > 0) bound += upper_bound(child_count[f], p, k, a);
    }
    if (static_cast<std::int64_t>(bound) <= best) continue;

    std::uint64_t total = immediate;
    const std::uint32_t mask = entered_mask | (1u << d);
    for (std::size_t f = 0; f < kFeedbacks; ++f) {
      if (!child_count[f]) continue;
      std::size_t p = 0, k = 0;
      bool a = false;
      child_state(f, p, k, a);
      if (k > 0) total += solve(child[f], p, k, a, mask).successes;
    }
    if (static_cast<std::int64_t>(total) > best) {
      best = static_cast<std::int64_t>(total);
      best_digit = static_cast<char>('0' + d);
    }
  }

  const Entry entry{static_cast<std::uint64_t>(best), best_digit};
  memo_.emplace(key, entry);
  return entry;
}

LockDecision LockPlanner::decide(const LockBelief& belief, const std::string& prefix, std::size_t episodes_left) {
  if (belief.empty()) throw Error("LockPlanner: belief is empty");
  if (prefix.size() >= game_.length) throw Error("LockPlanner: episode already complete");
  if (episodes_left < 1) throw Error("LockPlanner: no episodes left");
  if (episodes_left > 255) throw Error("LockPlanner: too many episodes");
  const Bits b = to_bits(belief);

  // Digits outside entered_mask must be mutually interchangeable. At the root
  // this is recovered from the belief: two digits are interchangeable when
  // swapping them maps the consistent set onto itself.
  const std::size_t m = game_.alphabet_size;
  auto swapped_equal = [&](char x, char y) {
    for (const auto& c : belief.consistent_codes) {
      std::string s = c;
      for (char& ch : s) {
        if (ch == x) ch = y;
        else if (ch == y) ch = x;
      }
      auto it = index_.find(s);
      if (it == index_.end() || !(b[it->second / 64] >> (it->second % 64) & 1)) return false;
    }
    return true;
  };
  std::uint32_t entered = 0;
  for (char c : prefix) entered |= 1u << (c - '0');
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t d = 0; d < m; ++d) {
    if (entered & (1u << d)) continue;
    auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& cls) {
      return swapped_equal(static_cast<char>('0' + cls.front()), static_cast<char>('0' + d));
    });
    if (it == classes.end()) classes.push_back({d});
    else it->push_back(d);
  }
  // Keep the largest class interchangeable; every other digit counts as seen.
  std::size_t keep = 0;
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (classes[i].size() > classes[keep].size()) keep = i;
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i == keep) continue;
    for (std::size_t d : classes[i]) entered |= 1u << d;
  }

  const bool alive = belief.consistent_codes.front().compare(0, prefix.size(), prefix) == 0;
  const Entry e = solve(b, prefix.size(), episodes_left, alive, entered);
  return {e.digit, e.successes, belief.consistent_codes.size()};
}

char lock_bayes_optimal_action(LockPlanner& planner, const LockBelief& belief, const std::string& prefix,
                               std::size_t position, std::size_t episodes_left, std::size_t digits_left_in_episode) {
  const std::size_t n = planner.game().length;
  if (position != prefix.size() + 1 || digits_left_in_episode != n - prefix.size()) {
    throw Error("lock_bayes_optimal_action: position, prefix and digits left disagree");
  }
  return planner.decide(belief, prefix, episodes_left).digit;
}

}  // namespace psrl
