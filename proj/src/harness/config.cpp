#include "yolo/harness/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "yolo/common/error.hpp"

namespace yolo::harness {

using nlohmann::json;

std::string PlannerChoice::to_string() const {
  switch (kind) {
    case PlannerKind::kReference:
      return "reference";
    case PlannerKind::kNone:
      return "none";
    case PlannerKind::kArtifact:
      return "artifact:" + hash;
  }
  return "";
}

PlannerChoice PlannerChoice::parse(std::string_view text) {
  PlannerChoice p;
  if (text == "reference") return p;
  if (text == "none") {
    p.kind = PlannerKind::kNone;
    return p;
  }
  constexpr std::string_view prefix = "artifact:";
  if (text.starts_with(prefix) && text.size() > prefix.size()) {
    p.kind = PlannerKind::kArtifact;
    p.hash = std::string(text.substr(prefix.size()));
    return p;
  }
  throw ConfigError("planner: expected reference, none or artifact:<hash>, got '" + std::string(text) + "'");
}

namespace {

// Reads an object field by field; finish() rejects whatever was not read.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(join(key) + ": unknown field");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    const std::string path = join(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
      if (std::is_unsigned_v<T> && !v.is_number_unsigned()) {
        throw ConfigError(path + ": expected a non-negative integer");
      }
      out = v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
      out = v.get<std::string>();
    } else {
      if (!v.is_array()) throw ConfigError(path + ": expected an array");
      using E = typename T::value_type;
      T items;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string item = path + "[" + std::to_string(k) + "]";
        if (!v[k].is_number_integer()) throw ConfigError(item + ": expected an integer");
        if (std::is_unsigned_v<E> && !v[k].is_number_unsigned()) {
          throw ConfigError(item + ": expected a non-negative integer");
        }
        items.push_back(v[k].get<E>());
      }
      out = std::move(items);
    }
  }

  void object(const char* key, const std::function<void(Reader&)>& body) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Reader inner(j_.at(key), join(key));
    body(inner);
    inner.finish();
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

nn::Activation activation_from(const std::string& text, const std::string& path) {
  if (text == "relu") return nn::Activation::kRelu;
  if (text == "tanh") return nn::Activation::kTanh;
  throw ConfigError(path + ": expected relu or tanh, got '" + text + "'");
}

std::string activation_name(nn::Activation a) { return a == nn::Activation::kRelu ? "relu" : "tanh"; }

void read_mappo(Reader& r, marl::MappoConfig& c) {
  r.get("gamma", c.gamma);
  r.get("gae_lambda", c.gae_lambda);
  r.get("clip_eps", c.clip_eps);
  r.get("epochs", c.epochs);
  r.get("minibatches", c.minibatches);
  r.get("rollout_length", c.rollout_length);
  r.get("n_envs", c.n_envs);
  r.get("entropy_coef", c.entropy_coef);
  r.get("value_coef", c.value_coef);
  r.get("actor_lr", c.actor_lr);
  r.get("critic_lr", c.critic_lr);
  r.get("max_grad_norm", c.max_grad_norm);
  r.get("parameter_sharing", c.parameter_sharing);
  r.get("hidden", c.hidden);
  std::string act = activation_name(c.activation);
  r.get("activation", act);
  c.activation = activation_from(act, r.join("activation"));
}

void read_qmix(Reader& r, marl::QmixConfig& c) {
  r.get("gamma", c.gamma);
  r.get("replay_capacity", c.replay_capacity);
  r.get("batch_size", c.batch_size);
  r.get("target_update_interval", c.target_update_interval);
  r.get("train_interval", c.train_interval);
  r.get("warmup_steps", c.warmup_steps);
  r.get("epsilon_start", c.epsilon_start);
  r.get("epsilon_end", c.epsilon_end);
  r.get("epsilon_anneal_steps", c.epsilon_anneal_steps);
  r.get("mixing_embed_dim", c.mixing_embed_dim);
  r.get("lr", c.lr);
  r.get("max_grad_norm", c.max_grad_norm);
  r.get("double_q", c.double_q);
  r.get("parameter_sharing", c.parameter_sharing);
  r.get("hidden", c.hidden);
  std::string act = activation_name(c.activation);
  r.get("activation", act);
  c.activation = activation_from(act, r.join("activation"));
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  try {
    Reader r(j, "");
    r.object("env", [&](Reader& e) {
      std::string id(envs::to_string(c.env.id));
      e.get("id", id);
      try {
        c.env.id = envs::env_id_from_string(id);
      } catch (const Error&) {
        throw ConfigError("env.id: unknown environment '" + id + "'");
      }
      e.get("rng_seed", c.env.rng_seed);
      e.object("lbf", [&](Reader& l) {
        l.get("grid_size", c.env.lbf.grid_size);
        l.get("n_agents", c.env.lbf.n_agents);
        l.get("n_foods", c.env.lbf.n_foods);
        l.get("force_coop", c.env.lbf.force_coop);
        l.get("agent_levels", c.env.lbf.agent_levels);
        l.get("episode_limit", c.env.lbf.episode_limit);
      });
      e.object("mpe", [&](Reader& m) {
        m.get("n_agents", c.env.mpe.n_agents);
        m.get("dt", c.env.mpe.dt);
        m.get("damping", c.env.mpe.damping);
        m.get("accel", c.env.mpe.accel);
        m.get("max_speed", c.env.mpe.max_speed);
        m.get("world_extent", c.env.mpe.world_extent);
        m.get("collision_radius", c.env.mpe.collision_radius);
        m.get("collision_penalty", c.env.mpe.collision_penalty);
        m.get("episode_limit", c.env.mpe.episode_limit);
      });
    });
    std::string algo(marl::to_string(c.algorithm));
    r.get("algorithm", algo);
    c.algorithm = marl::algorithm_from_string(algo);
    r.object("mappo", [&](Reader& m) { read_mappo(m, c.mappo); });
    r.object("qmix", [&](Reader& q) { read_qmix(q, c.qmix); });
    r.object("shaping", [&](Reader& s) {
      s.get("enabled", c.shaping.enabled);
      s.get("r_prime", c.shaping.r_prime);
      s.get("p_prime", c.shaping.p_prime);
    });
    std::string planner = c.planner.to_string();
    r.get("planner", planner);
    c.planner = PlannerChoice::parse(planner);
    r.get("seeds", c.seeds);
    r.get("total_steps", c.total_steps);
    r.get("eval_interval", c.eval_interval);
    r.get("eval_episodes", c.eval_episodes);
    r.get("output_dir", c.output_dir);
    r.get("artifact_dir", c.artifact_dir);
    r.get("planner_timeout_ms", c.planner_timeout_ms);
    r.get("fallback_to_reference", c.fallback_to_reference);
    r.get("jobs", c.jobs);
    r.object("llm", [&](Reader& l) {
      l.get("endpoint", c.llm.endpoint);
      l.get("model_id", c.llm.model_id);
      l.get("api_key_env", c.llm.api_key_env);
      l.get("temperature", c.llm.temperature);
      l.get("max_tokens", c.llm.max_tokens);
      l.get("max_retries", c.llm.max_retries);
      l.get("offline", c.llm.offline);
    });
    r.finish();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config: " + path.string() + " is not valid JSON");
  return run_config_from_json(j);
}

void RunConfig::validate() const {
  env.validate();
  mappo.validate();
  qmix.validate();
  shaping.validate();
  llm.validate();
  if (seeds.empty()) throw ConfigError("seeds: must not be empty");
  if (planner.kind == PlannerKind::kNone && shaping.enabled) {
    throw ConfigError("shaping.enabled: must be false when planner is none");
  }
  if (planner.kind == PlannerKind::kArtifact && planner.hash.empty()) throw ConfigError("planner: missing hash");
  if (planner_timeout_ms < 1) throw ConfigError("planner_timeout_ms: must be >= 1");
  if (jobs < 1) throw ConfigError("jobs: must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  train_config(seeds.front()).validate();
}

marl::TrainConfig RunConfig::train_config(std::uint64_t seed) const {
  marl::TrainConfig t;
  t.env = env;
  t.algorithm = algorithm;
  t.mappo = mappo;
  t.qmix = qmix;
  t.shaping = shaping;
  t.total_steps = total_steps;
  t.eval_interval = eval_interval;
  t.eval_episodes = eval_episodes;
  t.seed = seed;
  t.fallback_to_reference = fallback_to_reference;
  return t;
}

json to_json(const RunConfig& c) {
  const auto& m = c.mappo;
  const auto& q = c.qmix;
  return {
      {"env",
       {{"id", std::string(envs::to_string(c.env.id))},
        {"rng_seed", c.env.rng_seed},
        {"lbf",
         {{"grid_size", c.env.lbf.grid_size},
          {"n_agents", c.env.lbf.n_agents},
          {"n_foods", c.env.lbf.n_foods},
          {"force_coop", c.env.lbf.force_coop},
          {"agent_levels", c.env.lbf.agent_levels},
          {"episode_limit", c.env.lbf.episode_limit}}},
        {"mpe",
         {{"n_agents", c.env.mpe.n_agents},
          {"dt", c.env.mpe.dt},
          {"damping", c.env.mpe.damping},
          {"accel", c.env.mpe.accel},
          {"max_speed", c.env.mpe.max_speed},
          {"world_extent", c.env.mpe.world_extent},
          {"collision_radius", c.env.mpe.collision_radius},
          {"collision_penalty", c.env.mpe.collision_penalty},
          {"episode_limit", c.env.mpe.episode_limit}}}}},
      {"algorithm", std::string(marl::to_string(c.algorithm))},
      {"mappo",
       {{"gamma", m.gamma},
        {"gae_lambda", m.gae_lambda},
        {"clip_eps", m.clip_eps},
        {"epochs", m.epochs},
        {"minibatches", m.minibatches},
        {"rollout_length", m.rollout_length},
        {"n_envs", m.n_envs},
        {"entropy_coef", m.entropy_coef},
        {"value_coef", m.value_coef},
        {"actor_lr", m.actor_lr},
        {"critic_lr", m.critic_lr},
        {"max_grad_norm", m.max_grad_norm},
        {"parameter_sharing", m.parameter_sharing},
        {"hidden", m.hidden},
        {"activation", activation_name(m.activation)}}},
      {"qmix",
       {{"gamma", q.gamma},
        {"replay_capacity", q.replay_capacity},
        {"batch_size", q.batch_size},
        {"target_update_interval", q.target_update_interval},
        {"train_interval", q.train_interval},
        {"warmup_steps", q.warmup_steps},
        {"epsilon_start", q.epsilon_start},
        {"epsilon_end", q.epsilon_end},
        {"epsilon_anneal_steps", q.epsilon_anneal_steps},
        {"mixing_embed_dim", q.mixing_embed_dim},
        {"lr", q.lr},
        {"max_grad_norm", q.max_grad_norm},
        {"double_q", q.double_q},
        {"parameter_sharing", q.parameter_sharing},
        {"hidden", q.hidden},
        {"activation", activation_name(q.activation)}}},
      {"shaping", {{"enabled", c.shaping.enabled}, {"r_prime", c.shaping.r_prime}, {"p_prime", c.shaping.p_prime}}},
      {"planner", c.planner.to_string()},
      {"seeds", c.seeds},
      {"total_steps", c.total_steps},
      {"eval_interval", c.eval_interval},
      {"eval_episodes", c.eval_episodes},
      {"output_dir", c.output_dir.string()},
      {"artifact_dir", c.artifact_dir.string()},
      {"planner_timeout_ms", c.planner_timeout_ms},
      {"fallback_to_reference", c.fallback_to_reference},
      {"jobs", c.jobs},
      {"llm",
       {{"endpoint", c.llm.endpoint},
        {"model_id", c.llm.model_id},
        {"api_key_env", c.llm.api_key_env},
        {"temperature", c.llm.temperature},
        {"max_tokens", c.llm.max_tokens},
        {"max_retries", c.llm.max_retries},
        {"offline", c.llm.offline}}}};
}

namespace {

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"env.id", "environment: lbf or mpe_spread"},
      {"env.rng_seed", "reset seed used by Environment::reset() without an argument"},
      {"env.lbf.grid_size", "side length of the square grid"},
      {"env.lbf.n_agents", "number of agents"},
      {"env.lbf.n_foods", "number of food items"},
      {"env.lbf.force_coop", "every food has the summed agent level, so all agents must load together"},
      {"env.lbf.agent_levels", "level of each agent"},
      {"env.lbf.episode_limit", "steps before truncation"},
      {"env.mpe.n_agents", "agents, and landmarks, in simple spread"},
      {"env.mpe.dt", "integration step"},
      {"env.mpe.damping", "fraction of velocity removed each step"},
      {"env.mpe.accel", "acceleration of a move action"},
      {"env.mpe.max_speed", "speed cap"},
      {"env.mpe.world_extent", "initial positions drawn from [-extent, extent]"},
      {"env.mpe.collision_radius", "agent radius; two agents collide when closer than twice this"},
      {"env.mpe.collision_penalty", "reward subtracted per colliding pair"},
      {"env.mpe.episode_limit", "steps per episode"},
      {"algorithm", "mappo or qmix"},
      {"mappo.gamma", "discount"},
      {"mappo.gae_lambda", "GAE lambda"},
      {"mappo.clip_eps", "ratio clip range"},
      {"mappo.epochs", "passes over each rollout"},
      {"mappo.minibatches", "minibatches per epoch"},
      {"mappo.rollout_length", "steps per environment per rollout"},
      {"mappo.n_envs", "environments stepped in lockstep"},
      {"mappo.entropy_coef", "entropy bonus weight"},
      {"mappo.value_coef", "critic loss weight"},
      {"mappo.actor_lr", "actor Adam step size"},
      {"mappo.critic_lr", "critic Adam step size"},
      {"mappo.max_grad_norm", "global gradient-norm clip"},
      {"mappo.parameter_sharing", "one actor for all agents, with an agent one-hot input"},
      {"mappo.hidden", "hidden layer widths"},
      {"mappo.activation", "relu or tanh"},
      {"qmix.gamma", "discount"},
      {"qmix.replay_capacity", "transitions kept"},
      {"qmix.batch_size", "transitions per update"},
      {"qmix.target_update_interval", "updates between target copies"},
      {"qmix.train_interval", "environment steps between updates"},
      {"qmix.warmup_steps", "transitions before the first update"},
      {"qmix.epsilon_start", "initial exploration rate"},
      {"qmix.epsilon_end", "final exploration rate"},
      {"qmix.epsilon_anneal_steps", "steps of linear annealing"},
      {"qmix.mixing_embed_dim", "mixer hidden width"},
      {"qmix.lr", "Adam step size"},
      {"qmix.max_grad_norm", "global gradient-norm clip"},
      {"qmix.double_q", "online agents pick the target action"},
      {"qmix.parameter_sharing", "one agent network for all agents, with an agent one-hot input"},
      {"qmix.hidden", "hidden layer widths"},
      {"qmix.activation", "relu or tanh"},
      {"shaping.enabled", "add alignment bonuses to the training reward"},
      {"shaping.r_prime", "bonus per aligned agent, > 0"},
      {"shaping.p_prime", "penalty per misaligned agent, <= 0"},
      {"planner", "reference, none, or artifact:<hash> from the artifact store"},
      {"seeds", "one run per seed"},
      {"total_steps", "environment steps per run"},
      {"eval_interval", "steps between evaluations"},
      {"eval_episodes", "greedy episodes per evaluation"},
      {"output_dir", "parent directory of run directories"},
      {"artifact_dir", "artifact store root"},
      {"planner_timeout_ms", "per-request limit for external planners"},
      {"fallback_to_reference", "switch to the reference planner when an external planner fails"},
      {"jobs", "seeds trained concurrently"},
      {"llm.endpoint", "chat-completion URL"},
      {"llm.model_id", "model name sent with each request"},
      {"llm.api_key_env", "environment variable holding the API key"},
      {"llm.temperature", "sampling temperature"},
      {"llm.max_tokens", "completion length limit"},
      {"llm.max_retries", "extra attempts after a planner fails validation"},
      {"llm.offline", "forbid every network call"},
  };
  return d;
}

std::string type_name(const json& v) {
  if (v.is_boolean()) return "bool";
  if (v.is_number_integer()) return "int";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "list";
  return "object";
}

void walk(const json& j, const std::string& prefix, std::ostringstream& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      walk(value, path, out);
      continue;
    }
    const auto it = descriptions().find(path);
    out << path << " (" << type_name(value) << ", default " << value.dump() << ")";
    if (it != descriptions().end()) out << ": " << it->second;
    out << "\n";
  }
}

}  // namespace

std::string explain_config() {
  std::ostringstream out;
  out << "Run configuration (JSON). Every field is optional; unknown fields are rejected.\n";
  walk(to_json(RunConfig{}), "", out);
  return out.str();
}

}  // namespace yolo::harness
