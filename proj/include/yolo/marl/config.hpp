#ifndef YOLO_MARL_CONFIG_HPP_
#define YOLO_MARL_CONFIG_HPP_

#include <vector>

#include "yolo/nn/mlp.hpp"

namespace yolo::marl {

struct MappoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  int epochs = 4;
  int minibatches = 4;
  // Steps per environment per rollout; a rollout holds rollout_length * n_envs steps.
  int rollout_length = 128;
  int n_envs = 8;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double actor_lr = 5e-4;
  double critic_lr = 5e-4;
  double max_grad_norm = 10.0;
  bool parameter_sharing = true;
  std::vector<int> hidden = {64, 64};
  nn::Activation activation = nn::Activation::kRelu;

  void validate() const;  // throws ConfigError
};

struct QmixConfig {
  double gamma = 0.99;
  int replay_capacity = 50000;
  int batch_size = 256;  // transitions
  // Gradient updates between hard target-network copies.
  int target_update_interval = 200;
  // Environment steps between gradient updates.
  int train_interval = 4;
  // Transitions collected before the first update.
  int warmup_steps = 1000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_anneal_steps = 50000;
  int mixing_embed_dim = 32;
  double lr = 5e-4;
  double max_grad_norm = 10.0;
  bool double_q = true;
  bool parameter_sharing = true;
  std::vector<int> hidden = {64, 64};
  nn::Activation activation = nn::Activation::kRelu;

  void validate() const;  // throws ConfigError
  double epsilon_at(long step) const;
};

}  // namespace yolo::marl

#endif  // YOLO_MARL_CONFIG_HPP_
