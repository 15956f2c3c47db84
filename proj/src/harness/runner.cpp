#include "psrl/harness/runner.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "psrl/agents/classical.hpp"
#include "psrl/agents/llm_agents.hpp"
#include "psrl/envs/bandit.hpp"
#include "psrl/envs/customer.hpp"
#include "psrl/envs/guess.hpp"
#include "psrl/envs/riverswim.hpp"
#include "psrl/llm/backends.hpp"
#include "psrl/llm/knowledge.hpp"
#include "psrl/llm/oracle.hpp"
#include "psrl/metrics/metrics.hpp"

namespace psrl::harness {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kCodeVersion = "0.1.0";

void write_file(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", p.string()));
    out << text;
  }
  fs::rename(tmp, p);
}

std::string now_iso() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_bandit_env(const std::string& id) { return id == "bernoulli" || id == "informative"; }

// The environment of one trial plus what its backends and agents need.
struct TrialEnvironment {
  std::unique_ptr<Environment> env;
  llm::OracleSpec oracle;
  std::optional<CustomerServiceSpec> customer;
  std::size_t optimal_arm = 0;
};

TrialEnvironment make_environment(const ExperimentConfig& c, const llm::TemplateRegistry& registry, Rng& rng) {
  const EnvironmentConfig& e = c.environment;
  TrialEnvironment t;
  t.oracle.registry = &registry;
  t.oracle.horizon = c.budget.horizon;
  t.oracle.sampler_user_template = e.id + ".sampler.user";
  if (e.id == "bernoulli") {
    BernoulliBanditSpec spec;
    if (!e.arm_means.empty()) {
      spec.arm_means = e.arm_means;
      spec.optimal_index = static_cast<std::size_t>(
          std::max_element(e.arm_means.begin(), e.arm_means.end()) - e.arm_means.begin());
    } else {
      spec = BernoulliBanditSpec::evaluation_instance(rng, e.arms, e.best_mean, e.rest_mean);
    }
    auto labels = e.arm_labels.empty() ? random_letter_labels(rng, spec.arm_means.size()) : e.arm_labels;
    t.optimal_arm = spec.optimal_index;
    t.oracle.env = llm::OracleEnv::Bernoulli;
    t.oracle.action_labels = labels;
    t.env = std::make_unique<BernoulliBandit>(spec, labels);
  } else if (e.id == "informative") {
    InformativeBanditSpec spec;
    spec.num_informative_arms = e.informative_arms;
    spec.optimal_arm = e.optimal_arm ? *e.optimal_arm : 1 + uniform_index(rng, e.informative_arms);
    auto env = std::make_unique<InformativeBandit>(spec);
    t.optimal_arm = spec.optimal_arm;
    t.oracle.env = llm::OracleEnv::Informative;
    t.oracle.action_labels = env->action_set(kBanditState);
    t.env = std::move(env);
  } else if (e.id == "riverswim") {
    RiverSwimSpec spec = e.river_length == 3 || e.river_length == 4 ? RiverSwimSpec::standard(e.river_length)
                                                                    : RiverSwimSpec{};
    spec.length = e.river_length;
    spec.horizon = c.budget.horizon;
    auto env = std::make_unique<RiverSwim>(spec);
    t.oracle.env = llm::OracleEnv::Tabular;
    for (std::size_t s = 0; s < spec.length; ++s) t.oracle.tabular.states.push_back(env->state_label(s));
    for (std::size_t a = 0; a < 2; ++a) t.oracle.tabular.actions.push_back(env->action_label(a));
    t.env = std::move(env);
  } else if (e.id == "comblock") {
    const CombLockSpec spec = e.code ? CombLockSpec{*e.code} : CombLockSpec::random(rng);
    t.oracle.env = llm::OracleEnv::Lock;
    t.env = std::make_unique<CombinationLock>(spec);
  } else if (e.id == "wordle") {
    t.oracle.env = llm::OracleEnv::Wordle;
    t.oracle.corpus = load_wordle_corpus(e.corpus_file);
    if (t.oracle.corpus.empty()) throw ConfigError({"environment.corpus_file: no words"});
    const std::string target = e.target ? *e.target : t.oracle.corpus[uniform_index(rng, t.oracle.corpus.size())];
    t.env = std::make_unique<Wordle>(WordleSpec{target});
  } else if (e.id == "customer") {
    auto scenarios = load_customer_dataset(e.dataset_file);
    if (scenarios.empty()) throw ConfigError({"environment.dataset_file: no scenarios"});
    const std::size_t i = e.scenario_index ? *e.scenario_index : uniform_index(rng, scenarios.size());
    if (i >= scenarios.size()) {
      throw ConfigError({fmt::format("environment.scenario_index: {} exceeds the {} scenarios", i, scenarios.size())});
    }
    t.customer = scenarios[i];
    t.customer->prior_mode = e.prior_mode;
  } else {
    throw ConfigError({fmt::format("environment.id: unknown environment '{}'", e.id)});
  }
  return t;
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& c, TrialEnvironment& t, llm::LlmClient& client,
                                  const llm::TemplateRegistry& registry, const TrialResources& res, Rng rng) {
  const AgentConfig& a = c.agent;
  Environment& env = *t.env;
  ActionSetFn legal = [&env](const std::string& s) { return env.action_set(s); };
  if (a.id == "random") return std::make_unique<RandomAgent>(legal, rng);
  if (a.id == "thompson") return std::make_unique<ThompsonBanditAgent>(env.action_set(kBanditState), rng);
  if (a.id == "vanilla_psrl") {
    VanillaPsrlConfig vc;
    vc.alpha0 = a.alpha0;
    return std::make_unique<VanillaPsrlAgent>(dynamic_cast<const TabularEnvironment&>(env), vc, rng);
  }
  if (a.id == "bayes_lock") {
    auto planner = res.planner ? res.planner : std::make_shared<LockPlanner>();
    return std::make_unique<BayesLockAgent>(c.budget.episodes, planner);
  }

  LlmAgentContext ctx{&client, &registry, env.describe(), legal, a.policy_cache};
  auto prior = [&]() -> std::string {
    if (!a.prior.empty()) return a.prior;
    if (t.customer) {
      client.set_position(0, 0);
      return build_customer_prior(client, registry, *t.customer, a.temperatures.posterior);
    }
    return llm::OracleBackend(t.oracle, 0).initial_knowledge();
  };
  if (a.id == "llm_psrl") {
    LlmPsrlConfig pc;
    pc.sampler_system_template = c.environment.id + ".sampler.system";
    pc.sampler_user_template = c.environment.id + ".sampler.user";
    pc.initial_prior = prior();
    pc.temperatures = a.temperatures;
    pc.update_mode = a.update_mode;
    return std::make_unique<LlmPsrlAgent>(ctx, pc, rng);
  }
  if (a.id == "llm_ids") {
    LlmIdsConfig ic;
    ic.mode = a.ids_mode;
    ic.initial_prior = prior();
    ic.temperatures = a.temperatures;
    ic.grid_size = a.grid_size;
    ic.optimal_value = a.optimal_value.value_or(env.informed_optimal_value());
    return std::make_unique<LlmIdsAgent>(ctx, ic, rng);
  }
  if (a.id == "icrl") return std::make_unique<IcrlAgent>(ctx, IcrlConfig{a.keep_probability, a.temperatures.policy}, rng);
  if (a.id == "reflexion") {
    ReflexionConfig rc;
    rc.temperature = a.temperatures.policy;
    rc.reflector_temperature = a.temperatures.posterior;
    return std::make_unique<ReflexionAgent>(ctx, rc, rng);
  }
  if (a.id == "icpi") {
    IcpiConfig ic{c.budget.horizon, a.rollout_horizon, a.rollouts_per_action, a.temperatures.policy};
    return std::make_unique<IcpiAgent>(ctx, ic, rng);
  }
  throw ConfigError({fmt::format("agent.id: unknown agent '{}'", a.id)});
}

std::unique_ptr<llm::ChatBackend> make_trial_backend(const ExperimentConfig& c, const TrialEnvironment& t,
                                                     std::uint64_t seed) {
  if (c.backend.kind == "oracle") return std::make_unique<llm::OracleBackend>(t.oracle, seed);
  return std::make_unique<llm::ScriptedBackend>(c.backend.script, c.backend.script_options);
}

std::string stats_json(const TrialResult& r) {
  json j;
  j["trial"] = r.trial;
  j["status"] = r.status;
  j["error"] = r.error;
  j["episodes_completed"] = r.rows.size();
  j["calls"] = r.calls;
  j["reprompts"] = r.reprompts;
  j["fallbacks"] = r.fallbacks;
  j["cache_hits"] = r.cache_hits;
  j["warnings"] = r.warnings;
  j["seconds"] = r.seconds;
  return j.dump(2) + "\n";
}

std::string tokens_csv(const TokenLedger& ledger) {
  std::string out = "role,episode,input_tokens,output_tokens\n";
  for (const auto& [key, counts] : ledger.entries()) {
    out += fmt::format("{},{},{},{}\n", key.first, key.second, counts.input, counts.output);
  }
  return out;
}

TokenLedger parse_tokens_csv(const std::string& text) {
  TokenLedger ledger;
  const auto rows = parse_csv(text);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw ParseError(fmt::format("tokens.csv line {}: expected 4 fields", i + 1));
    ledger.add(r[0], std::stoull(r[1]), std::stoull(r[2]), std::stoull(r[3]));
  }
  return ledger;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits CSV text into records of fields, honouring quoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ParseError("csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_text_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", p));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trial_dir_name(std::size_t trial) { return fmt::format("trial_{:04d}", trial); }

std::string episodes_csv_header() {
  return "experiment,agent,environment,trial,episode,regret,cumulative_regret,realized_regret,solved,"
         "unsolved_episodes,suffix_failure,min_action_frequency,input_tokens,output_tokens,action";
}

std::string to_csv_line(const EpisodeRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", csv_field(r.experiment), csv_field(r.agent),
                     csv_field(r.environment), r.trial, r.episode, num(r.regret), num(r.cumulative_regret),
                     num(r.realized_regret), r.solved ? 1 : 0, r.unsolved_episodes,
                     r.suffix_failure ? std::to_string(*r.suffix_failure) : "",
                     r.min_action_frequency ? num(*r.min_action_frequency) : "", r.input_tokens, r.output_tokens,
                     csv_field(r.action));
}

std::vector<EpisodeRow> parse_episodes_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ParseError("episodes.csv: empty");
  std::vector<EpisodeRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 15) throw ParseError(fmt::format("episodes.csv line {}: expected 15 fields", i + 1));
    EpisodeRow r;
    r.experiment = f[0];
    r.agent = f[1];
    r.environment = f[2];
    r.trial = std::stoull(f[3]);
    r.episode = std::stoull(f[4]);
    r.regret = std::stod(f[5]);
    r.cumulative_regret = std::stod(f[6]);
    r.realized_regret = std::stod(f[7]);
    r.solved = f[8] == "1";
    r.unsolved_episodes = std::stoull(f[9]);
    if (!f[10].empty()) r.suffix_failure = std::stoi(f[10]);
    if (!f[11].empty()) r.min_action_frequency = std::stod(f[11]);
    r.input_tokens = std::stoull(f[12]);
    r.output_tokens = std::stoull(f[13]);
    r.action = f[14];
    out.push_back(std::move(r));
  }
  return out;
}

llm::TemplateRegistry build_registry(const ExperimentConfig& config) {
  llm::TemplateRegistry registry;
  for (const auto& [id, body] : config.agent.template_overrides) registry.override_template(id, body);
  return registry;
}

TrialResult run_trial(const ExperimentConfig& c, std::size_t trial, const TrialResources& res,
                      const std::string& trial_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult out;
  out.trial = trial;
  const llm::TemplateRegistry& registry = res.registry ? *res.registry : llm::default_registry();

  const std::uint64_t stream_seed = derive_stream(c.seed, trial)();
  Rng instance_rng = derive_stream(stream_seed, 1);
  Rng dynamics_rng = derive_stream(stream_seed, 2);
  Rng agent_rng = derive_stream(stream_seed, 3);
  const std::uint64_t backend_seed = derive_stream(stream_seed, 4)();

  std::unique_ptr<llm::JsonlTranscript> transcript;
  if (!trial_dir.empty()) {
    fs::create_directories(trial_dir);
    transcript = std::make_unique<llm::JsonlTranscript>((fs::path(trial_dir) / "transcript.jsonl").string());
  }

  // Declared before the client so the agent dies first; its stats are read
  // after the episode loop, whether or not the trial finished.
  std::unique_ptr<llm::ChatBackend> own_backend;
  std::unique_ptr<llm::LlmClient> client_holder;
  std::unique_ptr<Agent> agent;
  LlmAgentBase* llm_agent = nullptr;
  std::optional<TrialEnvironment> holder;
  try {
    holder = make_environment(c, registry, instance_rng);
    TrialEnvironment& t = *holder;
    llm::ChatBackend* backend = res.shared_backend.get();
    if (!backend) {
      own_backend = make_trial_backend(c, t, backend_seed);
      backend = own_backend.get();
    }
    client_holder =
        std::make_unique<llm::LlmClient>(*backend, c.backend.models, c.backend.retry, transcript.get(), &out.ledger);
    llm::LlmClient& client = *client_holder;
    client.set_trial(trial);
    if (t.customer) {
      ChatFn chat = [&client](const std::string& role, const std::string& system, const std::string& user) {
        llm::ChatRequest req;
        req.role_tag = role;
        req.system = llm::Prompt::raw(system);
        req.user = llm::Prompt::raw(user);
        req.temperature = role == "judge" ? 0.0 : 1.0;
        return client.complete(std::move(req)).response_text;
      };
      t.env = std::make_unique<CustomerService>(*t.customer, chat);
    }

    agent = make_agent(c, t, client, registry, res, agent_rng);
    llm_agent = dynamic_cast<LlmAgentBase*>(agent.get());
    auto* psrl_agent = dynamic_cast<LlmPsrlAgent*>(agent.get());
    Environment& env = *t.env;

    std::vector<std::size_t> choices;
    double cumulative = 0.0;
    std::size_t unsolved = 0;
    for (std::size_t k = 1; k <= c.budget.episodes; ++k) {
      const Trajectory traj = run_episode(env, *agent, c.budget, k, dynamics_rng);
      if (psrl_agent) {
        if (auto v = check_llm_psrl_calls(psrl_agent->episode_calls().back(), c.agent.update_mode,
                                          c.agent.policy_cache)) {
          throw Error(fmt::format("episode {}: {}", k, *v));
        }
      }
      EpisodeRow row;
      row.experiment = c.name;
      row.agent = c.agent.id;
      row.environment = c.environment.id;
      row.trial = trial;
      row.episode = k;
      row.realized_regret = realized_regret(env, traj);
      row.regret = env.expected_regret(traj).value_or(row.realized_regret);
      cumulative += row.regret;
      row.cumulative_regret = cumulative;
      row.solved = env.solved(traj);
      if (!row.solved) ++unsolved;
      row.unsolved_episodes = unsolved;
      std::string actions;
      for (const auto& step : traj.steps) actions += (actions.empty() ? "" : " ") + step.action;
      row.action = actions;
      if (is_bandit_env(c.environment.id) && !traj.steps.empty()) {
        if (auto* b = dynamic_cast<BernoulliBandit*>(&env)) choices.push_back(b->arm_index(traj.steps[0].action));
        if (auto* b = dynamic_cast<InformativeBandit*>(&env)) choices.push_back(b->arm_index(traj.steps[0].action));
      }
      out.rows.push_back(std::move(row));
    }
    if (is_bandit_env(c.environment.id)) {
      const auto sf = suffix_failure(choices, t.optimal_arm);
      const auto mf = min_action_frequency(choices, env.action_set(kBanditState).size());
      for (std::size_t i = 0; i < out.rows.size(); ++i) {
        out.rows[i].suffix_failure = sf[i];
        out.rows[i].min_action_frequency = mf[i];
      }
    }
    out.status = "done";
  } catch (const llm::BackendError& e) {
    out.status = "aborted";
    out.error = e.what();
  } catch (const std::exception& e) {
    out.status = "failed";
    out.error = e.what();
  }

  for (auto& row : out.rows) {
    const TokenCounts tc = out.ledger.episode_total(row.episode);
    row.input_tokens = tc.input;
    row.output_tokens = tc.output;
  }
  if (llm_agent) {
    const auto& s = llm_agent->stats();
    out.calls = s.calls;
    out.reprompts = s.reprompts;
    out.fallbacks = s.fallbacks;
    out.cache_hits = s.cache_hits;
    out.warnings = s.warnings;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!trial_dir.empty()) {
    std::string csv = episodes_csv_header() + "\n";
    for (const auto& row : out.rows) csv += to_csv_line(row) + "\n";
    write_file(fs::path(trial_dir) / "episodes.csv", csv);
    write_file(fs::path(trial_dir) / "tokens.csv", tokens_csv(out.ledger));
    write_file(fs::path(trial_dir) / "status.json", stats_json(out));
  }
  return out;
}

CostConfirmationRequired::CostConfirmationRequired(double dollars)
    : Error(fmt::format("a live run is estimated at ${:.2f}; pass --yes to proceed", dollars)), dollars_(dollars) {}

double estimate_cost(const ExperimentConfig& c) {
  const auto& table = reference_token_use();
  const ReferenceTokenUse* ref = nullptr;
  for (const auto& r : table)
    if (r.environment == c.environment.id) ref = &r;
  if (!ref) {
    // No reference figure: take the most expensive environment.
    for (const auto& r : table)
      if (!ref || r.input_tokens_per_episode * c.prices.input_per_million +
                          r.output_tokens_per_episode * c.prices.output_per_million >
                      ref->input_tokens_per_episode * c.prices.input_per_million +
                          ref->output_tokens_per_episode * c.prices.output_per_million)
        ref = &r;
  }
  const double per_episode = (ref->input_tokens_per_episode * c.prices.input_per_million +
                              ref->output_tokens_per_episode * c.prices.output_per_million) /
                             1e6;
  return per_episode * static_cast<double>(c.budget.episodes * c.trials);
}

namespace {

std::string aggregate_csv(const ExperimentConfig& c, const std::vector<std::vector<EpisodeRow>>& trials) {
  std::string out =
      "experiment,agent,environment,episode,trials,regret_mean,regret_se,cumulative_regret_mean,"
      "cumulative_regret_se,realized_regret_mean,realized_regret_se,solved_mean,solved_se,"
      "unsolved_episodes_mean,unsolved_episodes_se,suffix_failure_mean,suffix_failure_se,"
      "min_action_frequency_mean,min_action_frequency_se,input_tokens_mean,output_tokens_mean,total_tokens_mean\n";
  if (trials.empty()) return out;
  const bool bandit = is_bandit_env(c.environment.id);
  const std::vector<std::function<double(const EpisodeRow&)>> fields{
      [](const EpisodeRow& r) { return r.regret; },
      [](const EpisodeRow& r) { return r.cumulative_regret; },
      [](const EpisodeRow& r) { return r.realized_regret; },
      [](const EpisodeRow& r) { return r.solved ? 1.0 : 0.0; },
      [](const EpisodeRow& r) { return static_cast<double>(r.unsolved_episodes); },
      [](const EpisodeRow& r) { return static_cast<double>(r.suffix_failure.value_or(0)); },
      [](const EpisodeRow& r) { return r.min_action_frequency.value_or(0.0); },
      [](const EpisodeRow& r) { return static_cast<double>(r.input_tokens); },
      [](const EpisodeRow& r) { return static_cast<double>(r.output_tokens); },
  };
  std::vector<AggregateCurve> agg;
  for (const auto& f : fields) {
    std::vector<std::vector<double>> series;
    for (const auto& rows : trials) {
      std::vector<double> s;
      for (const auto& r : rows) s.push_back(f(r));
      series.push_back(std::move(s));
    }
    agg.push_back(aggregate(series));
  }
  for (std::size_t i = 0; i < agg[0].mean.size(); ++i) {
    auto m = [&](std::size_t f) { return num(agg[f].mean[i]); };
    auto se = [&](std::size_t f) { return num(agg[f].std_error[i]); };
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(c.name),
                       c.agent.id, c.environment.id, i + 1, trials.size(), m(0), se(0), m(1), se(1), m(2), se(2), m(3),
                       se(3), m(4), se(4), bandit ? m(5) : "", bandit ? se(5) : "", bandit ? m(6) : "",
                       bandit ? se(6) : "", m(7), m(8), num(agg[7].mean[i] + agg[8].mean[i]));
  }
  return out;
}

json read_json(const fs::path& p) { return json::parse(read_text_file(p)); }

std::string trial_status(const fs::path& dir) {
  const fs::path p = dir / "status.json";
  if (!fs::exists(p)) return "";
  try {
    return read_json(p).value("status", "");
  } catch (const std::exception&) {
    return "";
  }
}

}  // namespace

RunSummary run_experiment(ExperimentConfig c, const RunOptions& opt) {
  if (opt.trials) c.trials = *opt.trials;
  if (opt.seed) c.seed = *opt.seed;
  if (opt.parallel) c.parallel = *opt.parallel;
  if (c.trials < 1) throw ConfigError({"trials: must be at least 1"});
  if (c.parallel < 1) throw ConfigError({"parallel: must be at least 1"});

  RunSummary summary;
  summary.output_dir = !opt.output_dir.empty() ? opt.output_dir
                       : !c.output_dir.empty() ? c.output_dir
                                               : (fs::path("runs") / c.name).string();
  const fs::path root(summary.output_dir);
  std::mutex log_mutex;
  auto log = [&](const std::string& line) {
    if (!opt.progress) return;
    std::lock_guard lock(log_mutex);
    *opt.progress << line << '\n' << std::flush;
  };

  std::shared_ptr<llm::ChatBackend> shared;
  if (c.backend.kind == "openai" && c.uses_llm()) {
    const double dollars = estimate_cost(c);
    log(fmt::format("estimated cost: ${:.2f} for {} trials of {} episodes", dollars, c.trials, c.budget.episodes));
    if (!opt.cost_confirmed) throw CostConfirmationRequired(dollars);
    auto limiter = std::make_shared<llm::RateLimiter>(c.backend.requests_per_minute, c.backend.tokens_per_minute);
    shared = std::make_shared<llm::OpenAiBackend>(c.backend.openai, limiter);
  }

  const llm::TemplateRegistry registry = build_registry(c);
  const json config_snapshot = json::parse(c.source_json.empty() ? "{}" : c.source_json);
  fs::create_directories(root);
  const fs::path manifest_path = root / "manifest.json";
  json manifest;
  if (fs::exists(manifest_path)) {
    manifest = read_json(manifest_path);
    if (manifest.value("config", json()) != config_snapshot || manifest.value("seed", std::uint64_t{0}) != c.seed) {
      throw ConfigError({fmt::format("{} holds a run of a different configuration or seed", root.string())});
    }
  }
  manifest["name"] = c.name;
  manifest["code_version"] = kCodeVersion;
  manifest["config"] = config_snapshot;
  manifest["seed"] = c.seed;
  manifest["trials"] = c.trials;
  manifest["episodes"] = c.budget.episodes;
  manifest["horizon"] = c.budget.horizon;
  manifest["environment"] = c.environment.id;
  manifest["agent"] = c.agent.id;
  manifest["backend"] = c.backend.kind;
  json templates = json::object();
  for (const auto& id : registry.ids()) templates[id] = registry.get(id).body();
  manifest["templates"] = templates;
  manifest["started_at"] = now_iso();

  std::vector<std::size_t> pending;
  json statuses = json::array();
  for (std::size_t t = 1; t <= c.trials; ++t) {
    const fs::path dir = root / trial_dir_name(t);
    const std::string status = trial_status(dir);
    if (status == "done") {
      ++summary.skipped;
    } else {
      fs::remove_all(dir);
      pending.push_back(t);
    }
    statuses.push_back({{"trial", t}, {"status", status == "done" ? "done" : "pending"}});
  }
  manifest["trial_status"] = statuses;
  write_file(manifest_path, manifest.dump(2) + "\n");

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    TrialResources res;
    res.registry = &registry;
    res.shared_backend = shared;
    if (c.agent.id == "bayes_lock") res.planner = std::make_shared<LockPlanner>();
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const std::size_t t = pending[i];
      const TrialResult r = run_trial(c, t, res, (root / trial_dir_name(t)).string());
      log(fmt::format("trial {}: {}{}", t, r.status, r.error.empty() ? "" : " (" + r.error + ")"));
    }
  };
  const std::size_t workers = std::min(c.parallel, std::max<std::size_t>(pending.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  summary.executed = pending.size();

  // Run-level artifacts from every trial on disk.
  std::vector<std::vector<EpisodeRow>> done_rows;
  TokenLedger ledger;
  std::string episodes = episodes_csv_header() + "\n";
  statuses = json::array();
  for (std::size_t t = 1; t <= c.trials; ++t) {
    const fs::path dir = root / trial_dir_name(t);
    json st = read_json(dir / "status.json");
    const std::string status = st.value("status", "failed");
    statuses.push_back({{"trial", t},
                        {"status", status},
                        {"error", st.value("error", "")},
                        {"seconds", st.value("seconds", 0.0)}});
    if (status == "done") {
      ++summary.done;
      auto rows = parse_episodes_csv(read_text_file(dir / "episodes.csv"));
      for (const auto& r : rows) episodes += to_csv_line(r) + "\n";
      done_rows.push_back(std::move(rows));
      ledger.merge(parse_tokens_csv(read_text_file(dir / "tokens.csv")));
    } else if (status == "aborted") {
      ++summary.aborted;
    } else {
      ++summary.failed;
    }
  }
  write_file(root / "episodes.csv", episodes);
  write_file(root / "aggregate.csv", aggregate_csv(c, done_rows));

  const TokenSummary ts = token_summary(ledger, c.prices, c.budget.episodes * done_rows.size());
  std::string tokens = "role,mean_input_per_episode,mean_output_per_episode\n";
  for (const auto& [role, m] : ts.per_role_per_episode) tokens += fmt::format("{},{},{}\n", role, num(m.input), num(m.output));
  write_file(root / "tokens.csv", tokens);

  manifest["trial_status"] = statuses;
  manifest["finished_at"] = now_iso();
  manifest["summary"] = {{"done", summary.done}, {"failed", summary.failed}, {"aborted", summary.aborted}};
  write_file(manifest_path, manifest.dump(2) + "\n");
  return summary;
}

}  // namespace psrl::harness
