#include "yolo/envs/mpe_spread.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "yolo/common/error.hpp"

namespace yolo::envs {
namespace {

constexpr int kAgentStride = 4;
constexpr int kLandmarkStride = 2;

}  // namespace

MpeSpreadEnv::MpeSpreadEnv(EnvConfig config) : config_(std::move(config)) {
  if (config_.id != EnvId::kMpeSpread) throw ConfigError("env.id: MpeSpreadEnv requires mpe_spread");
  config_.validate();
  spec_ = make_spec(config_);
  state_.values.assign(spec_.state_size(), 0.0);
}

GlobalState MpeSpreadEnv::reset(std::uint64_t seed) {
  const auto& c = config_.mpe;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  auto& v = state_.values;
  v.assign(spec_.state_size(), 0.0);
  for (int i = 0; i < c.n_agents; ++i) {
    v[kAgentStride * i] = coord(rng);
    v[kAgentStride * i + 1] = coord(rng);
  }
  const int base = kAgentStride * c.n_agents;
  for (int j = 0; j < c.n_agents; ++j) {
    v[base + kLandmarkStride * j] = coord(rng);
    v[base + kLandmarkStride * j + 1] = coord(rng);
  }
  steps_ = 0;
  finished_ = false;
  return state_;
}

void MpeSpreadEnv::set_state(const GlobalState& state, int steps_taken) {
  check_state(spec_, state);
  state_ = state;
  steps_ = steps_taken;
  finished_ = steps_ >= config_.mpe.episode_limit;
}

double MpeSpreadEnv::distance_term(const GlobalState& state, int n_agents) {
  const auto& v = state.values;
  const int base = kAgentStride * n_agents;
  double total = 0.0;
  for (int j = 0; j < n_agents; ++j) {
    const double lx = v[base + kLandmarkStride * j];
    const double ly = v[base + kLandmarkStride * j + 1];
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_agents; ++i) {
      best = std::min(best, std::hypot(v[kAgentStride * i] - lx, v[kAgentStride * i + 1] - ly));
    }
    total += best;
  }
  return -total;
}

int MpeSpreadEnv::collision_count(const GlobalState& state, int n_agents, double radius) {
  const auto& v = state.values;
  int count = 0;
  for (int a = 0; a < n_agents; ++a) {
    for (int b = a + 1; b < n_agents; ++b) {
      const double d = std::hypot(v[kAgentStride * a] - v[kAgentStride * b],
                                  v[kAgentStride * a + 1] - v[kAgentStride * b + 1]);
      if (d < 2.0 * radius) ++count;
    }
  }
  return count;
}

StepResult MpeSpreadEnv::step(const JointAction& action) {
  const auto& c = config_.mpe;
  if (static_cast<int>(action.actions.size()) != c.n_agents) {
    throw ContractViolation("joint action has " + std::to_string(action.actions.size()) +
                            " entries, expected " + std::to_string(c.n_agents));
  }
  for (int a : action.actions) {
    if (a < 0 || a >= kMpeActionCount) throw ContractViolation("MPE action index out of range: " + std::to_string(a));
  }
  if (finished_) throw ContractViolation("step called on a finished episode; reset first");

  auto& v = state_.values;
  for (int i = 0; i < c.n_agents; ++i) {
    double fx = 0.0;
    double fy = 0.0;
    switch (action.actions[i]) {
      case kMoveLeft:
        fx = -1.0;
        break;
      case kMoveRight:
        fx = 1.0;
        break;
      case kMoveDown:
        fy = -1.0;
        break;
      case kMoveUp:
        fy = 1.0;
        break;
      default:
        break;
    }
    double* agent = &v[kAgentStride * i];
    double vx = agent[2] * (1.0 - c.damping) + fx * c.accel * c.dt;
    double vy = agent[3] * (1.0 - c.damping) + fy * c.accel * c.dt;
    const double speed = std::hypot(vx, vy);
    if (speed > c.max_speed) {
      vx *= c.max_speed / speed;
      vy *= c.max_speed / speed;
    }
    agent[0] = std::clamp(agent[0] + vx * c.dt, -c.world_extent, c.world_extent);
    agent[1] = std::clamp(agent[1] + vy * c.dt, -c.world_extent, c.world_extent);
    agent[2] = vx;
    agent[3] = vy;
  }

  const int collisions = collision_count(state_, c.n_agents, c.collision_radius);
  ++steps_;
  StepResult result;
  result.reward = distance_term(state_, c.n_agents) - c.collision_penalty * collisions;
  result.terminated = false;
  result.done = steps_ >= c.episode_limit;
  finished_ = result.done;
  result.next_state = state_;
  result.info["collision_count"] = collisions;
  return result;
}

}  // namespace yolo::envs
