#include "yolo/shaping/shaping.hpp"

#include <cmath>

#include "yolo/common/error.hpp"
#include "yolo/plan/reference.hpp"

namespace yolo::shaping {

void ShapingConfig::validate() const {
  if (!(r_prime > 0.0) || !std::isfinite(r_prime)) throw ConfigError("shaping.r_prime: must be > 0");
  if (!(p_prime <= 0.0) || !std::isfinite(p_prime)) throw ConfigError("shaping.p_prime: must be <= 0");
}

ShapedStep shape(double env_reward, const envs::JointAction& actions, const plan::AssignmentVector& assignments,
                 const interp::InterpretedState& state, const envs::EnvSpec& spec, const ShapingConfig& config) {
  const std::size_t n = actions.actions.size();
  if (assignments.size() != n || state.agents.size() != n) {
    throw ContractViolation("shape: actions, assignments and agents differ in length");
  }
  ShapedStep out;
  out.env_reward = env_reward;
  out.deltas.assign(n, 0.0);
  out.aligned.assign(n, false);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto admissible = plan::admissible_actions(state, static_cast<int>(i), assignments[i], spec);
    out.aligned[i] = admissible.contains(actions.actions[i]);
    if (config.enabled) out.deltas[i] = out.aligned[i] ? config.r_prime : config.p_prime;
    sum += out.deltas[i];
  }
  out.total = config.enabled ? env_reward + sum : env_reward;
  return out;
}

}  // namespace yolo::shaping
