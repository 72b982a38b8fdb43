#include "yolo/marl/config.hpp"

#include <algorithm>

#include "yolo/common/error.hpp"

namespace yolo::marl {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_hidden(const std::vector<int>& hidden, const std::string& prefix) {
  require(!hidden.empty(), prefix + ".hidden: at least one hidden layer required");
  for (int h : hidden) require(h > 0, prefix + ".hidden: layer widths must be positive");
}

}  // namespace

void MappoConfig::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, "mappo.gamma: must lie in [0, 1)");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "mappo.gae_lambda: must lie in [0, 1]");
  require(clip_eps > 0.0, "mappo.clip_eps: must be > 0");
  require(epochs >= 1, "mappo.epochs: must be >= 1");
  require(minibatches >= 1, "mappo.minibatches: must be >= 1");
  require(rollout_length >= 1, "mappo.rollout_length: must be >= 1");
  require(n_envs >= 1, "mappo.n_envs: must be >= 1");
  require(static_cast<long>(rollout_length) * n_envs >= minibatches,
          "mappo.minibatches: more minibatches than samples per rollout");
  require(entropy_coef >= 0.0, "mappo.entropy_coef: must be >= 0");
  require(value_coef > 0.0, "mappo.value_coef: must be > 0");
  require(actor_lr > 0.0, "mappo.actor_lr: must be > 0");
  require(critic_lr > 0.0, "mappo.critic_lr: must be > 0");
  require(max_grad_norm > 0.0, "mappo.max_grad_norm: must be > 0");
  check_hidden(hidden, "mappo");
}

void QmixConfig::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, "qmix.gamma: must lie in [0, 1)");
  require(batch_size >= 1, "qmix.batch_size: must be >= 1");
  require(replay_capacity >= batch_size, "qmix.replay_capacity: must be >= qmix.batch_size");
  require(target_update_interval >= 1, "qmix.target_update_interval: must be >= 1");
  require(train_interval >= 1, "qmix.train_interval: must be >= 1");
  require(warmup_steps >= 0, "qmix.warmup_steps: must be >= 0");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "qmix.epsilon_start: must lie in [0, 1]");
  require(epsilon_end >= 0.0 && epsilon_end <= 1.0, "qmix.epsilon_end: must lie in [0, 1]");
  require(epsilon_anneal_steps >= 0, "qmix.epsilon_anneal_steps: must be >= 0");
  require(mixing_embed_dim >= 1, "qmix.mixing_embed_dim: must be >= 1");
  require(lr > 0.0, "qmix.lr: must be > 0");
  require(max_grad_norm > 0.0, "qmix.max_grad_norm: must be > 0");
  check_hidden(hidden, "qmix");
}

double QmixConfig::epsilon_at(long step) const {
  if (epsilon_anneal_steps == 0 || step >= epsilon_anneal_steps) return epsilon_end;
  const double frac = static_cast<double>(std::max(step, 0L)) / epsilon_anneal_steps;
  return epsilon_start + frac * (epsilon_end - epsilon_start);
}

}  // namespace yolo::marl
