#ifndef YOLO_MARL_QMIX_HPP_
#define YOLO_MARL_QMIX_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "yolo/marl/config.hpp"
#include "yolo/marl/observation.hpp"
#include "yolo/nn/adam.hpp"
#include "yolo/nn/mlp.hpp"

namespace yolo::marl {

struct MixCache {
  nn::Matrix agent_qs;
  nn::ForwardCache w1, b1, w2, v;
  nn::Matrix w1_raw, w2_raw;  // hypernetwork outputs before |.|
  nn::Matrix hidden_pre;      // B x embed
  nn::Matrix hidden;          // elu(hidden_pre)
};

// Q_tot(s, q) = elu(q W1(s) + b1(s)) . w2(s) + V(s), where W1 = |hyper_w1(s)|
// and w2 = |hyper_w2(s)|, so dQ_tot/dq_i >= 0 everywhere. hyper_w1, hyper_b1
// and hyper_w2 are single linear layers of the state; hyper_v is a two-layer
// relu network. The flat parameter order is w1, b1, w2, v.
class MixingNetwork {
 public:
  MixingNetwork() = default;
  MixingNetwork(int n_agents, int state_features, int embed_dim, std::uint64_t seed);

  int n_agents() const { return n_agents_; }
  int embed_dim() const { return embed_; }

  nn::Vector forward(const nn::Matrix& agent_qs, const nn::Matrix& states) const;
  nn::Vector forward(const nn::Matrix& agent_qs, const nn::Matrix& states, MixCache& cache) const;
  // Gradient of sum_b dqtot[b] * Q_tot[b]; accumulates into param_grad.
  void backward(const MixCache& cache, const nn::Vector& dqtot, std::span<double> param_grad,
                nn::Matrix* agent_q_grad) const;

  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  nn::Mlp& hyper_w1() { return w1_; }
  nn::Mlp& hyper_b1() { return b1_; }
  nn::Mlp& hyper_w2() { return w2_; }
  nn::Mlp& hyper_v() { return v_; }
  const nn::Mlp& hyper_w1() const { return w1_; }
  const nn::Mlp& hyper_b1() const { return b1_; }
  const nn::Mlp& hyper_w2() const { return w2_; }
  const nn::Mlp& hyper_v() const { return v_; }

 private:
  int n_agents_ = 0;
  int embed_ = 0;
  nn::Mlp w1_, b1_, w2_, v_;
};

struct QmixNetworks {
  std::vector<nn::Mlp> agents;  // 1 under parameter sharing
  MixingNetwork mixer;
  std::vector<nn::Mlp> target_agents;
  MixingNetwork target_mixer;
  // One Adam state over agents then mixer parameters.
  nn::OptimState optim;
  std::int64_t updates = 0;

  QmixNetworks() = default;
  QmixNetworks(const ObservationEncoder& encoder, int n_actions, const QmixConfig& config, std::uint64_t seed);

  const nn::Mlp& agent_for(int agent) const { return agents[agents.size() == 1 ? 0 : agent]; }
  void sync_targets();
};

// Transitions stored as encoded state features.
struct QmixBatch {
  nn::Matrix states;
  nn::Matrix next_states;
  std::vector<int> actions;  // B * n_agents, sample-major
  std::vector<double> rewards;
  std::vector<std::uint8_t> terminated;

  std::size_t size() const { return rewards.size(); }
};

struct QmixLosses {
  double td_loss = 0.0;
  double mean_q_tot = 0.0;
};

class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int n_agents, int state_features);

  void add(std::span<const double> state, std::span<const int> actions, double reward, bool terminated,
           std::span<const double> next_state);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return static_cast<std::size_t>(states_.rows()); }
  QmixBatch sample(int batch_size, std::mt19937_64& rng) const;

 private:
  int n_agents_;
  nn::Matrix states_, next_states_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> terminated_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
};

// Per-agent Q-values, one row per (sample, agent), from encoded state rows.
nn::Matrix agent_q_values(const std::vector<nn::Mlp>& agents, const ObservationEncoder& encoder,
                          const nn::Matrix& states);

// y = R + gamma * (1 - terminated) * Q_tot_target(next), with double-Q action
// choice by the online agents when configured.
nn::Vector qmix_targets(const QmixBatch& batch, const QmixConfig& config, const QmixNetworks& nets,
                        const ObservationEncoder& encoder);

// One gradient step on mean (Q_tot - y)^2; hard-copies targets every
// target_update_interval updates. Throws TrainingAborted on non-finite loss.
QmixLosses qmix_update(const QmixBatch& batch, const QmixConfig& config, QmixNetworks& nets,
                       const ObservationEncoder& encoder);

}  // namespace yolo::marl

#endif  // YOLO_MARL_QMIX_HPP_
