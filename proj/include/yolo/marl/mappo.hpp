#ifndef YOLO_MARL_MAPPO_HPP_
#define YOLO_MARL_MAPPO_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "yolo/marl/config.hpp"
#include "yolo/marl/observation.hpp"
#include "yolo/nn/adam.hpp"
#include "yolo/nn/mlp.hpp"

namespace yolo::marl {

// Actors map an observation to action logits; the critic maps encoded global
// state features to a scalar value. actors.size() is 1 under parameter
// sharing, n_agents otherwise.
struct MappoNetworks {
  std::vector<nn::Mlp> actors;
  nn::Mlp critic;
  std::vector<nn::OptimState> actor_optim;
  nn::OptimState critic_optim;

  MappoNetworks() = default;
  MappoNetworks(const ObservationEncoder& encoder, int n_actions, const MappoConfig& config, std::uint64_t seed);

  const nn::Mlp& actor_for(int agent) const { return actors[actors.size() == 1 ? 0 : agent]; }
};

// One rollout flattened over (time, env). Observation rows are sample-major:
// row k * n_agents + i is agent i at sample k.
struct MappoBatch {
  int n_agents = 0;
  nn::Matrix states;
  nn::Matrix observations;
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> old_values;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return old_values.size(); }
};

struct MappoLosses {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
};

struct SurrogateTerm {
  double loss = 0.0;               // -min(ratio * A, clip(ratio) * A)
  std::vector<double> logit_grad;  // d loss / d logits
  double ratio = 1.0;
};

// Clipped surrogate for one (agent, sample) row, without the entropy bonus.
SurrogateTerm surrogate_term(std::span<const double> logits, int action, double old_log_prob, double advantage,
                             double clip_eps);

std::vector<double> log_softmax(std::span<const double> logits);

// Advantages are normalised over the whole batch before the epochs; the
// shared actor and the critic get separate Adam states and gradient clipping.
// Throws TrainingAborted on a non-finite loss or gradient.
MappoLosses mappo_update(const MappoBatch& batch, const MappoConfig& config, MappoNetworks& nets,
                         std::mt19937_64& rng);

}  // namespace yolo::marl

#endif  // YOLO_MARL_MAPPO_HPP_
