#include "yolo/marl/train.hpp"

#include <cmath>
#include <limits>

#include "yolo/common/error.hpp"
#include "yolo/common/seed.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/marl/gae.hpp"

namespace yolo::marl {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kEvalStream = 0xe7a1;
constexpr std::uint64_t kNetStream = 0x7e75;
constexpr std::uint64_t kPolicyStream = 0x5a3b;
constexpr std::uint64_t kEnvStream = 0x100;

int sample_categorical(std::span<const double> logits, std::mt19937_64& rng, double& log_prob) {
  const auto logp = log_softmax(logits);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cum = 0.0;
  int pick = static_cast<int>(logp.size()) - 1;
  for (std::size_t k = 0; k < logp.size(); ++k) {
    cum += std::exp(logp[k]);
    if (u < cum) {
      pick = static_cast<int>(k);
      break;
    }
  }
  log_prob = logp[pick];
  return pick;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) { return algorithm == Algorithm::kMappo ? "mappo" : "qmix"; }

Algorithm algorithm_from_string(std::string_view text) {
  if (text == "mappo") return Algorithm::kMappo;
  if (text == "qmix") return Algorithm::kQmix;
  throw ConfigError("algorithm: expected \"mappo\" or \"qmix\", got \"" + std::string(text) + "\"");
}

void TrainConfig::validate() const {
  env.validate();
  shaping.validate();
  if (algorithm == Algorithm::kMappo) {
    mappo.validate();
  } else {
    qmix.validate();
  }
  if (total_steps < 0) throw ConfigError("train.total_steps: must be >= 0");
  if (eval_interval < 1) throw ConfigError("train.eval_interval: must be >= 1");
  if (eval_episodes < 1) throw ConfigError("train.eval_episodes: must be >= 1");
}

struct Trainer::Slot {
  std::unique_ptr<envs::Environment> env;
  envs::GlobalState state;
  std::uint64_t seed_base = 0;
  std::uint64_t episodes = 0;

  void reset() { state = env->reset(derive_seed(seed_base, episodes++)); }
};

struct Trainer::Shaped {
  envs::StepResult result;
  double reward = 0.0;
};

Trainer::Trainer(TrainConfig config, std::unique_ptr<plan::Planner> planner)
    : config_(std::move(config)),
      planner_(std::move(planner)),
      spec_((config_.validate(), envs::make_spec(config_.env))),
      encoder_(config_.env, config_.algorithm == Algorithm::kMappo ? config_.mappo.parameter_sharing
                                                                     : config_.qmix.parameter_sharing),
      rng_(derive_seed(config_.seed, kPolicyStream)),
      next_eval_(config_.eval_interval) {
  if (config_.shaping.enabled && !planner_) {
    throw ConfigError("shaping.enabled: shaping requires a planning artifact");
  }
  const std::uint64_t net_seed = derive_seed(config_.seed, kNetStream);
  if (config_.algorithm == Algorithm::kMappo) {
    mappo_ = MappoNetworks(encoder_, spec_.n_actions(), config_.mappo, net_seed);
  } else {
    qmix_ = QmixNetworks(encoder_, spec_.n_actions(), config_.qmix, net_seed);
  }
}

Trainer::~Trainer() = default;

std::string Trainer::planner_description() const { return planner_ ? planner_->describe() : "none"; }

std::unique_ptr<Policy> Trainer::policy() const {
  if (config_.algorithm == Algorithm::kMappo) return std::make_unique<NetworkPolicy>(encoder_, mappo_.actors);
  return std::make_unique<NetworkPolicy>(encoder_, qmix_.agents);
}

void Trainer::save_checkpoints(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  if (config_.algorithm == Algorithm::kMappo) {
    for (std::size_t a = 0; a < mappo_.actors.size(); ++a) {
      nn::save_checkpoint(mappo_.actors[a], dir / ("actor_" + std::to_string(a) + ".ymlp"));
    }
    nn::save_checkpoint(mappo_.critic, dir / "critic.ymlp");
  } else {
    for (std::size_t a = 0; a < qmix_.agents.size(); ++a) {
      nn::save_checkpoint(qmix_.agents[a], dir / ("agent_" + std::to_string(a) + ".ymlp"));
    }
    nn::save_checkpoint(qmix_.mixer.hyper_w1(), dir / "mixer_w1.ymlp");
    nn::save_checkpoint(qmix_.mixer.hyper_b1(), dir / "mixer_b1.ymlp");
    nn::save_checkpoint(qmix_.mixer.hyper_w2(), dir / "mixer_w2.ymlp");
    nn::save_checkpoint(qmix_.mixer.hyper_v(), dir / "mixer_v.ymlp");
  }
}

Trainer::Shaped Trainer::env_step(Slot& slot, const envs::JointAction& actions) {
  Shaped out;
  if (!planner_) {
    out.result = slot.env->step(actions);
    out.reward = out.result.reward;
    return out;
  }
  const auto interpreted = interp::interpret(slot.state, spec_);
  plan::AssignmentVector tasks;
  try {
    tasks = planner_->plan(interpreted);
  } catch (const PlannerProtocolError& e) {
    if (!config_.fallback_to_reference) {
      throw TrainingAborted("planner " + planner_->describe() + " failed at step " + std::to_string(steps_) + ": " +
                            e.what());
    }
    planner_ = std::make_unique<plan::ReferencePlanner>(spec_);
    fell_back_ = true;
    tasks = planner_->plan(interpreted);
  }
  out.result = slot.env->step(actions);
  const auto shaped = shaping::shape(out.result.reward, actions, tasks, interpreted, spec_, config_.shaping);
  out.reward = shaped.total;
  for (bool a : shaped.aligned) aligned_count_ += a ? 1 : 0;
  aligned_total_ += static_cast<long>(shaped.aligned.size());
  return out;
}

void Trainer::record_losses(double actor, double critic) {
  loss_actor_sum_ += actor;
  loss_critic_sum_ += critic;
  ++loss_count_;
}

void Trainer::maybe_evaluate(bool final) {
  if (steps_ == 0) return;
  if (final) {
    if (!metrics_.empty() && metrics_.back().step == steps_) return;
  } else if (steps_ < next_eval_) {
    return;
  }
  while (next_eval_ <= steps_) next_eval_ += config_.eval_interval;
  const auto snapshot = policy();
  const auto eval = evaluate(*snapshot, config_.env, config_.eval_episodes, derive_seed(config_.seed, kEvalStream));
  MetricsRow row;
  row.step = steps_;
  row.mean_eval_return = eval.mean_return;
  row.min_return = eval.min_return;
  row.max_return = eval.max_return;
  row.actor_loss = loss_count_ ? loss_actor_sum_ / loss_count_ : kNan;
  row.critic_or_td_loss = loss_count_ ? loss_critic_sum_ / loss_count_ : kNan;
  row.epsilon = config_.algorithm == Algorithm::kQmix ? config_.qmix.epsilon_at(steps_) : 0.0;
  row.alignment_rate =
      planner_ ? (aligned_total_ ? static_cast<double>(aligned_count_) / aligned_total_ : kNan) : kNan;
  loss_actor_sum_ = loss_critic_sum_ = 0.0;
  loss_count_ = 0;
  aligned_count_ = aligned_total_ = 0;
  metrics_.push_back(row);
  if (on_eval) on_eval(row);
}

void Trainer::run() {
  if (config_.algorithm == Algorithm::kMappo) {
    run_mappo();
  } else {
    run_qmix();
  }
  maybe_evaluate(true);
}

void Trainer::run_mappo() {
  const auto& cfg = config_.mappo;
  const int n_envs = cfg.n_envs;
  const int horizon = cfg.rollout_length;
  const int n = encoder_.n_agents();
  const int s_dim = encoder_.state_features();
  const int o_dim = encoder_.obs_features();
  const std::size_t total = static_cast<std::size_t>(horizon) * n_envs;

  std::vector<Slot> slots(n_envs);
  for (int e = 0; e < n_envs; ++e) {
    slots[e].env = envs::make_environment(config_.env);
    slots[e].seed_base = derive_seed(config_.seed, kEnvStream + e);
    slots[e].reset();
  }

  // Rollout storage, index t * n_envs + e.
  MappoBatch batch;
  batch.n_agents = n;
  batch.states.resize(total, s_dim);
  batch.observations.resize(total * n, o_dim);
  batch.actions.resize(total * n);
  batch.old_log_probs.resize(total * n);
  batch.old_values.resize(total);
  std::vector<double> rewards(total), next_values(total);
  std::vector<std::uint8_t> ends(total);
  std::vector<std::uint8_t> bootstrap_next(total);

  nn::Matrix s_now(n_envs, s_dim);
  nn::Matrix o_now(static_cast<Eigen::Index>(n_envs) * n, o_dim);
  while (steps_ < config_.total_steps) {
    int t = 0;
    for (; t < horizon && steps_ < config_.total_steps; ++t) {
      for (int e = 0; e < n_envs; ++e) {
        encoder_.encode_state(slots[e].state, s_now.row(e).data());
        for (int i = 0; i < n; ++i) encoder_.obs_from_features(s_now.row(e).data(), i, o_now.row(e * n + i).data());
      }
      std::vector<nn::Matrix> logits(mappo_.actors.size());
      if (mappo_.actors.size() == 1) {
        logits[0] = mappo_.actors[0].forward(o_now);
      } else {
        for (int i = 0; i < n; ++i) {
          nn::Matrix rows(n_envs, o_dim);
          for (int e = 0; e < n_envs; ++e) rows.row(e) = o_now.row(e * n + i);
          logits[i] = mappo_.actors[i].forward(rows);
        }
      }
      const nn::Matrix values = mappo_.critic.forward(s_now);
      for (int e = 0; e < n_envs; ++e) {
        const std::size_t idx = static_cast<std::size_t>(t) * n_envs + e;
        envs::JointAction joint;
        joint.actions.resize(n);
        for (int i = 0; i < n; ++i) {
          const auto& lg = logits[mappo_.actors.size() == 1 ? 0 : i];
          const Eigen::Index r = mappo_.actors.size() == 1 ? e * n + i : e;
          double lp = 0.0;
          joint.actions[i] = sample_categorical(std::span<const double>(lg.row(r).data(), lg.cols()), rng_, lp);
          batch.actions[idx * n + i] = joint.actions[i];
          batch.old_log_probs[idx * n + i] = lp;
          batch.observations.row(idx * n + i) = o_now.row(e * n + i);
        }
        batch.states.row(idx) = s_now.row(e);
        batch.old_values[idx] = values(e, 0);
        const Shaped step = env_step(slots[e], joint);
        rewards[idx] = step.reward;
        ends[idx] = step.result.done ? 1 : 0;
        next_values[idx] = 0.0;
        bootstrap_next[idx] = 0;
        if (step.result.done) {
          if (!step.result.terminated) {
            next_values[idx] = mappo_.critic.forward(encoder_.state_vector(step.result.next_state))[0];
          }
          slots[e].reset();
        } else {
          slots[e].state = step.result.next_state;
          bootstrap_next[idx] = 1;
        }
      }
      steps_ += n_envs;
      maybe_evaluate(false);
    }
    if (t < horizon) break;  // budget exhausted mid-rollout

    for (int tt = 0; tt + 1 < horizon; ++tt) {
      for (int e = 0; e < n_envs; ++e) {
        const std::size_t idx = static_cast<std::size_t>(tt) * n_envs + e;
        if (bootstrap_next[idx]) next_values[idx] = batch.old_values[idx + n_envs];
      }
    }
    for (int e = 0; e < n_envs; ++e) {
      encoder_.encode_state(slots[e].state, s_now.row(e).data());
    }
    const nn::Matrix last_values = mappo_.critic.forward(s_now);
    for (int e = 0; e < n_envs; ++e) {
      const std::size_t idx = static_cast<std::size_t>(horizon - 1) * n_envs + e;
      if (bootstrap_next[idx]) next_values[idx] = last_values(e, 0);
    }

    batch.advantages.assign(total, 0.0);
    batch.returns.assign(total, 0.0);
    std::vector<double> r(horizon), v(horizon), nv(horizon);
    std::vector<std::uint8_t> end(horizon);
    for (int e = 0; e < n_envs; ++e) {
      for (int tt = 0; tt < horizon; ++tt) {
        const std::size_t idx = static_cast<std::size_t>(tt) * n_envs + e;
        r[tt] = rewards[idx];
        v[tt] = batch.old_values[idx];
        nv[tt] = next_values[idx];
        end[tt] = ends[idx];
      }
      const auto gae = compute_gae(r, v, nv, end, cfg.gamma, cfg.gae_lambda);
      for (int tt = 0; tt < horizon; ++tt) {
        const std::size_t idx = static_cast<std::size_t>(tt) * n_envs + e;
        batch.advantages[idx] = gae.advantages[tt];
        batch.returns[idx] = gae.returns[tt];
      }
    }
    const auto losses = mappo_update(batch, cfg, mappo_, rng_);
    record_losses(losses.actor_loss, losses.critic_loss);
  }
}

void Trainer::run_qmix() {
  const auto& cfg = config_.qmix;
  const int n = encoder_.n_agents();
  const int n_actions = spec_.n_actions();
  Slot slot;
  slot.env = envs::make_environment(config_.env);
  slot.seed_base = derive_seed(config_.seed, kEnvStream);
  slot.reset();
  ReplayBuffer replay(cfg.replay_capacity, n, encoder_.state_features());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, n_actions - 1);
  std::vector<double> obs(encoder_.obs_features());
  const std::size_t ready = static_cast<std::size_t>(std::max(cfg.batch_size, cfg.warmup_steps));

  while (steps_ < config_.total_steps) {
    const double eps = cfg.epsilon_at(steps_);
    envs::JointAction joint;
    joint.actions.resize(n);
    for (int i = 0; i < n; ++i) {
      if (unit(rng_) < eps) {
        joint.actions[i] = random_action(rng_);
      } else {
        encoder_.encode_obs(slot.state, i, obs.data());
        const auto q = qmix_.agent_for(i).forward(obs);
        joint.actions[i] = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
      }
    }
    const auto state_features = encoder_.state_vector(slot.state);
    const Shaped step = env_step(slot, joint);
    replay.add(state_features, joint.actions, step.reward, step.result.terminated,
               encoder_.state_vector(step.result.next_state));
    if (step.result.done) {
      slot.reset();
    } else {
      slot.state = step.result.next_state;
    }
    ++steps_;
    if (replay.size() >= ready && steps_ % cfg.train_interval == 0) {
      const auto sample = replay.sample(cfg.batch_size, rng_);
      const auto losses = qmix_update(sample, cfg, qmix_, encoder_);
      record_losses(kNan, losses.td_loss);
    }
    maybe_evaluate(false);
  }
}

TrainResult train(const TrainConfig& config, std::unique_ptr<plan::Planner> planner) {
  Trainer trainer(config, std::move(planner));
  trainer.run();
  return {trainer.policy(), trainer.metrics()};
}

TrainResult train(const TrainConfig& config, const plan::PlanningArtifact* artifact,
                  const std::filesystem::path& work_dir) {
  std::unique_ptr<plan::Planner> planner;
  if (artifact) planner = plan::make_planner(*artifact, envs::make_spec(config.env), work_dir);
  return train(config, std::move(planner));
}

}  // namespace yolo::marl
