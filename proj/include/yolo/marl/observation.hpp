#ifndef YOLO_MARL_OBSERVATION_HPP_
#define YOLO_MARL_OBSERVATION_HPP_

#include <vector>

#include "yolo/envs/environment.hpp"

namespace yolo::marl {

// Network inputs. State features are the global state with LBF coordinates
// divided by (grid_size - 1) and levels by the sum of agent levels (MPE values
// pass through unchanged); the critic sees them as is.
//
// An agent's observation carries the same values re-expressed around that
// agent: its own entry first (absolute), then every other agent and every
// target in index order with positions as offsets from the agent; then the
// distance from each agent (same order) to each target, Manhattan for LBF and
// Euclidean for MPE. With `agent_id` an agent-index one-hot is appended.
class ObservationEncoder {
 public:
  ObservationEncoder(const envs::EnvConfig& config, bool agent_id);

  int n_agents() const { return n_agents_; }
  int state_features() const { return static_cast<int>(scale_.size()); }
  int obs_features() const {
    return state_features() + n_agents_ * n_targets_ + (agent_id_ ? n_agents_ : 0);
  }
  bool agent_id() const { return agent_id_; }

  void encode_state(const envs::GlobalState& state, double* out) const;
  void encode_obs(const envs::GlobalState& state, int agent, double* out) const;
  std::vector<double> state_vector(const envs::GlobalState& state) const;
  std::vector<double> obs_vector(const envs::GlobalState& state, int agent) const;
  // From already-encoded state features.
  void obs_from_features(const double* features, int agent, double* out) const;

 private:
  int n_agents_ = 0;
  bool agent_id_ = true;
  bool lbf_ = true;
  int agent_stride_ = 0;
  int target_stride_ = 0;
  int n_targets_ = 0;
  std::vector<double> scale_;
};

}  // namespace yolo::marl

#endif  // YOLO_MARL_OBSERVATION_HPP_
