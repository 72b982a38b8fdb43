#ifndef YOLO_SHAPING_SHAPING_HPP_
#define YOLO_SHAPING_SHAPING_HPP_

#include <vector>

#include "yolo/envs/environment.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/plan/assignment.hpp"

namespace yolo::shaping {

struct ShapingConfig {
  double r_prime = 0.05;   // bonus for an aligned action, > 0
  double p_prime = -0.05;  // penalty otherwise, <= 0
  bool enabled = true;

  // Throws ConfigError.
  void validate() const;
};

struct ShapedStep {
  double env_reward = 0.0;
  std::vector<double> deltas;
  double total = 0.0;
  std::vector<bool> aligned;
};

// Training reward R = r + sum_i delta_i, where delta_i is r' when agent i's
// action lies in the admissible set of its assignment and p' otherwise.
// With shaping disabled every delta is 0 and R = r; alignment flags are
// still reported.
ShapedStep shape(double env_reward, const envs::JointAction& actions, const plan::AssignmentVector& assignments,
                 const interp::InterpretedState& state, const envs::EnvSpec& spec, const ShapingConfig& config);

}  // namespace yolo::shaping

#endif  // YOLO_SHAPING_SHAPING_HPP_
