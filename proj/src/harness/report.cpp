#include "psrl/harness/report.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "psrl/harness/runner.hpp"
#include "psrl/llm/chat.hpp"
#include "psrl/metrics/metrics.hpp"

namespace psrl::harness {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_manifest(const fs::path& dir) {
  const fs::path p = dir / "manifest.json";
  if (!fs::exists(p)) throw Error(fmt::format("{} is not a run directory (no manifest.json)", dir.string()));
  return json::parse(read_text_file(p.string()));
}

// Column name -> field for each record after the header.
std::vector<std::map<std::string, std::string>> read_table(const fs::path& p) {
  const auto rows = parse_csv(read_text_file(p.string()));
  std::vector<std::map<std::string, std::string>> out;
  if (rows.empty()) return out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ParseError(fmt::format("{} line {}: field count", p.string(), i + 1));
    std::map<std::string, std::string> rec;
    for (std::size_t j = 0; j < rows[0].size(); ++j) rec[rows[0][j]] = rows[i][j];
    out.push_back(std::move(rec));
  }
  return out;
}

std::string fixed(const std::string& v) { return v.empty() ? "-" : fmt::format("{:.4f}", std::stod(v)); }

std::string mean_se(const std::map<std::string, std::string>& rec, const std::string& col) {
  const std::string& m = rec.at(col + "_mean");
  if (m.empty()) return "-";
  return fmt::format("{} ± {}", fixed(m), fixed(rec.at(col + "_se")));
}

}  // namespace

std::string format_stats(const std::string& run_dir) {
  const fs::path root(run_dir);
  const json manifest = read_manifest(root);
  std::string out;
  out += fmt::format("Run: {}\n", manifest.value("name", ""));
  out += fmt::format("Environment: {}  Agent: {}  Backend: {}\n", manifest.value("environment", ""),
                     manifest.value("agent", ""), manifest.value("backend", ""));
  out += fmt::format("Episodes: {}  Horizon: {}  Seed: {}\n", manifest.value("episodes", 0),
                     manifest.value("horizon", 0), manifest.value("seed", std::uint64_t{0}));

  std::size_t done = 0, failed = 0, aborted = 0;
  std::map<std::string, std::size_t> calls;
  std::size_t reprompts = 0, fallbacks = 0, cache_hits = 0, warnings = 0;
  TokenLedger ledger;
  std::vector<std::string> failures;
  const std::size_t trials = manifest.value("trials", std::size_t{0});
  for (std::size_t t = 1; t <= trials; ++t) {
    const fs::path dir = root / trial_dir_name(t);
    if (!fs::exists(dir / "status.json")) {
      failures.push_back(fmt::format("  trial {}: not run", t));
      ++failed;
      continue;
    }
    const json st = json::parse(read_text_file((dir / "status.json").string()));
    const std::string status = st.value("status", "");
    if (status != "done") {
      (status == "aborted" ? aborted : failed) += 1;
      failures.push_back(fmt::format("  trial {}: {}: {}", t, status, st.value("error", "")));
      continue;
    }
    ++done;
    for (const auto& [role, n] : st.value("calls", std::map<std::string, std::size_t>{})) calls[role] += n;
    reprompts += st.value("reprompts", std::size_t{0});
    fallbacks += st.value("fallbacks", std::size_t{0});
    cache_hits += st.value("cache_hits", std::size_t{0});
    warnings += st.value("warnings", json::array()).size();
    for (const auto& rec : read_table(dir / "tokens.csv")) {
      ledger.add(rec.at("role"), std::stoull(rec.at("episode")), std::stoull(rec.at("input_tokens")),
                 std::stoull(rec.at("output_tokens")));
    }
  }
  out += fmt::format("Trials: {} (done {}, failed {}, aborted {})\n", trials, done, failed, aborted);
  for (const auto& f : failures) out += f + "\n";
  out += "\n";

  const auto agg = read_table(root / "aggregate.csv");
  out += fmt::format("{:>7}  {:<17}  {:<17}  {:<17}  {:<17}  {:<17}  {:>10}\n", "episode", "regret", "cumulative",
                     "unsolved", "suffix_failure", "min_frequency", "tokens");
  for (const auto& rec : agg) {
    out += fmt::format("{:>7}  {:<17}  {:<17}  {:<17}  {:<17}  {:<17}  {:>10}\n", rec.at("episode"),
                       mean_se(rec, "regret"), mean_se(rec, "cumulative_regret"), mean_se(rec, "unsolved_episodes"),
                       mean_se(rec, "suffix_failure"), mean_se(rec, "min_action_frequency"),
                       fmt::format("{:.1f}", std::stod(rec.at("total_tokens_mean"))));
  }
  if (!agg.empty()) {
    out += fmt::format("\nFinal cumulative regret: {}\n", mean_se(agg.back(), "cumulative_regret"));
    out += fmt::format("Final unsolved episodes: {}\n", mean_se(agg.back(), "unsolved_episodes"));
  }

  TokenPrices prices;
  const json cfg = manifest.value("config", json::object());
  if (cfg.contains("prices")) {
    prices.input_per_million = cfg["prices"].value("input_per_million", prices.input_per_million);
    prices.output_per_million = cfg["prices"].value("output_per_million", prices.output_per_million);
  }
  const std::size_t episodes = manifest.value("episodes", std::size_t{0});
  const TokenSummary ts = token_summary(ledger, prices, episodes * done);
  out += "\nTokens per episode by role (mean input / output):\n";
  if (ts.per_role_per_episode.empty()) out += "  none\n";
  for (const auto& [role, m] : ts.per_role_per_episode) {
    out += fmt::format("  {:<20} {:>10.1f} / {:>10.1f}\n", role, m.input, m.output);
  }
  out += fmt::format("Total tokens: {} (input {}, output {})\n", ts.total.total(), ts.total.input, ts.total.output);
  out += fmt::format("Mean tokens per episode: {:.1f}\n", ts.mean_tokens_per_episode);
  out += fmt::format("Cost at ${:.2f} / ${:.2f} per million tokens: ${:.4f}\n", prices.input_per_million,
                     prices.output_per_million, ts.cost_dollars);
  if (!calls.empty()) {
    out += "\nLanguage-model calls (done trials):\n";
    for (const auto& [role, n] : calls) out += fmt::format("  {:<20} {:>8}\n", role, n);
    out += fmt::format("Re-prompts: {}  Fallback actions: {}  Cache hits: {}  Warnings: {}\n", reprompts, fallbacks,
                       cache_hits, warnings);
  }
  return out;
}

std::size_t export_csv(const std::string& in, const std::string& out_path) {
  const fs::path root(in);
  std::vector<fs::path> runs;
  if (fs::exists(root / "manifest.json")) {
    runs.push_back(root);
  } else if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root))
      if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) runs.push_back(entry.path());
    std::sort(runs.begin(), runs.end());
  }
  if (runs.empty()) throw Error(fmt::format("no run directories under {}", in));

  std::string header, body;
  for (const auto& run : runs) {
    const std::string text = read_text_file((run / "aggregate.csv").string());
    const auto nl = text.find('\n');
    const std::string h = text.substr(0, nl);
    if (header.empty()) header = h;
    if (h != header) throw Error(fmt::format("{}: aggregate.csv has a different header", run.string()));
    if (nl != std::string::npos) body += text.substr(nl + 1);
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", out_path));
  out << header << '\n' << body;
  return runs.size();
}

ReplayReport replay_trial(const std::string& run_dir, std::size_t trial) {
  const fs::path root(run_dir);
  const json manifest = read_manifest(root);
  llm::TemplateRegistry registry;
  const json templates = manifest.value("templates", json::object());
  for (const auto& [id, body] : templates.items()) {
    registry.override_template(id, body.get<std::string>());
  }

  const fs::path path = root / trial_dir_name(trial) / "transcript.jsonl";
  if (!fs::exists(path)) throw Error(fmt::format("no transcript at {}", path.string()));
  ReplayReport report;
  std::istringstream lines(read_text_file(path.string()));
  std::string line;
  std::size_t n = 0;
  auto check = [&](std::size_t where, const std::string& which, const std::string& id, const llm::Bindings& b,
                   const std::string& text) {
    if (id.empty()) return;
    if (!registry.contains(id)) {
      report.mismatches.push_back(fmt::format("line {}: {} template '{}' is unknown to this run", where, which, id));
      return;
    }
    try {
      if (registry.render(id, b) != text) {
        report.mismatches.push_back(
            fmt::format("line {}: {} prompt differs from template '{}' rendered with its bindings", where, which, id));
      }
    } catch (const Error& e) {
      report.mismatches.push_back(fmt::format("line {}: {} prompt cannot be re-rendered: {}", where, which, e.what()));
    }
  };
  while (std::getline(lines, line)) {
    ++n;
    if (line.empty()) continue;
    llm::TranscriptRecord rec;
    try {
      rec = llm::TranscriptRecord::from_json_line(line);
    } catch (const std::exception& e) {
      report.mismatches.push_back(fmt::format("line {}: unreadable record: {}", n, e.what()));
      continue;
    }
    ++report.records;
    if (rec.compute_digest() != rec.digest) {
      report.mismatches.push_back(fmt::format("line {}: digest mismatch", n));
    }
    if (rec.trial != trial) {
      report.mismatches.push_back(fmt::format("line {}: record belongs to trial {}", n, rec.trial));
    }
    check(n, "system", rec.system_template, rec.system_bindings, rec.system);
    check(n, "user", rec.user_template, rec.user_bindings, rec.user);
  }
  return report;
}

}  // namespace psrl::harness
