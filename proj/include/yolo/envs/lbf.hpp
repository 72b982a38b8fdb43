#ifndef YOLO_ENVS_LBF_HPP_
#define YOLO_ENVS_LBF_HPP_

#include "yolo/envs/environment.hpp"

namespace yolo::envs {

// Level-Based Foraging on a square grid.
//
// State layout: (row, col, level) per agent, then (row, col, level) per food.
// A collected food keeps its coordinates and has level 0; it no longer
// occupies its cell. Foods spawn in the interior (never on the border) and
// never in the 8-neighbourhood of another food.
class LbfEnv final : public Environment {
 public:
  explicit LbfEnv(EnvConfig config);

  const EnvSpec& spec() const override { return spec_; }
  const EnvConfig& config() const override { return config_; }
  GlobalState reset(std::uint64_t seed) override;
  StepResult step(const JointAction& action) override;
  void set_state(const GlobalState& state, int steps_taken) override;
  const GlobalState& state() const override { return state_; }
  int steps_taken() const override { return steps_; }

  // Sum of food levels at the start of the episode; the reward normaliser.
  double total_food_level() const { return total_food_level_; }

 private:
  bool cell_blocked(int row, int col, int ignore_agent) const;

  EnvConfig config_;
  EnvSpec spec_;
  GlobalState state_;
  int steps_ = 0;
  double total_food_level_ = 0.0;
  bool finished_ = false;
};

}  // namespace yolo::envs

#endif  // YOLO_ENVS_LBF_HPP_
