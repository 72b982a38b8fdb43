#ifndef YOLO_ENVS_MPE_SPREAD_HPP_
#define YOLO_ENVS_MPE_SPREAD_HPP_

#include "yolo/envs/environment.hpp"

namespace yolo::envs {

// Simple-spread particle world with discrete actions: N agents, N landmarks.
//
// State layout: (x, y, vx, vy) per agent, then (x, y) per landmark.
class MpeSpreadEnv final : public Environment {
 public:
  explicit MpeSpreadEnv(EnvConfig config);

  const EnvSpec& spec() const override { return spec_; }
  const EnvConfig& config() const override { return config_; }
  GlobalState reset(std::uint64_t seed) override;
  StepResult step(const JointAction& action) override;
  void set_state(const GlobalState& state, int steps_taken) override;
  const GlobalState& state() const override { return state_; }
  int steps_taken() const override { return steps_; }

  // -sum over landmarks of the closest-agent distance; 0 when every landmark is covered.
  static double distance_term(const GlobalState& state, int n_agents);
  // Agent pairs closer than twice the collision radius.
  static int collision_count(const GlobalState& state, int n_agents, double radius);

 private:
  EnvConfig config_;
  EnvSpec spec_;
  GlobalState state_;
  int steps_ = 0;
  bool finished_ = false;
};

}  // namespace yolo::envs

#endif  // YOLO_ENVS_MPE_SPREAD_HPP_
