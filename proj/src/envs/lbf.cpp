#include "yolo/envs/lbf.hpp"

#include <cstdlib>
#include <numeric>
#include <random>

#include "yolo/common/error.hpp"

namespace yolo::envs {
namespace {

constexpr int kAgentStride = 3;
constexpr int kFoodStride = 3;
constexpr int kPlacementAttempts = 1000;

struct Cell {
  int row;
  int col;
};

Cell move_delta(int action) {
  switch (action) {
    case kNorth:
      return {-1, 0};
    case kSouth:
      return {1, 0};
    case kWest:
      return {0, -1};
    case kEast:
      return {0, 1};
    default:
      return {0, 0};
  }
}

}  // namespace

LbfEnv::LbfEnv(EnvConfig config) : config_(std::move(config)) {
  if (config_.id != EnvId::kLbf) throw ConfigError("env.id: LbfEnv requires lbf");
  config_.validate();
  spec_ = make_spec(config_);
  state_.values.assign(spec_.state_size(), 0.0);
}

GlobalState LbfEnv::reset(std::uint64_t seed) {
  const auto& c = config_.lbf;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> interior(1, c.grid_size - 2);
  std::uniform_int_distribution<int> anywhere(0, c.grid_size - 1);

  std::vector<Cell> foods;
  for (int j = 0; j < c.n_foods; ++j) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Cell cell{interior(rng), interior(rng)};
      bool clash = false;
      for (const auto& other : foods) {
        if (std::abs(other.row - cell.row) <= 1 && std::abs(other.col - cell.col) <= 1) clash = true;
      }
      if (!clash) {
        foods.push_back(cell);
        placed = true;
      }
    }
    if (!placed) throw ConfigError("env.n_foods: cannot place " + std::to_string(c.n_foods) + " foods");
  }

  std::vector<Cell> agents;
  for (int i = 0; i < c.n_agents; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Cell cell{anywhere(rng), anywhere(rng)};
      bool clash = false;
      for (const auto& f : foods) clash = clash || (f.row == cell.row && f.col == cell.col);
      for (const auto& a : agents) clash = clash || (a.row == cell.row && a.col == cell.col);
      if (!clash) {
        agents.push_back(cell);
        placed = true;
      }
    }
    if (!placed) throw ConfigError("env.n_agents: cannot place " + std::to_string(c.n_agents) + " agents");
  }

  const int level_sum = std::accumulate(c.agent_levels.begin(), c.agent_levels.end(), 0);
  std::uniform_int_distribution<int> food_level(1, level_sum);

  auto& v = state_.values;
  v.assign(spec_.state_size(), 0.0);
  for (int i = 0; i < c.n_agents; ++i) {
    v[kAgentStride * i] = agents[i].row;
    v[kAgentStride * i + 1] = agents[i].col;
    v[kAgentStride * i + 2] = c.agent_levels[i];
  }
  const int base = kAgentStride * c.n_agents;
  total_food_level_ = 0.0;
  for (int j = 0; j < c.n_foods; ++j) {
    const int level = c.force_coop ? level_sum : food_level(rng);
    v[base + kFoodStride * j] = foods[j].row;
    v[base + kFoodStride * j + 1] = foods[j].col;
    v[base + kFoodStride * j + 2] = level;
    total_food_level_ += level;
  }
  steps_ = 0;
  finished_ = false;
  return state_;
}

void LbfEnv::set_state(const GlobalState& state, int steps_taken) {
  check_state(spec_, state);
  state_ = state;
  steps_ = steps_taken;
  const int base = kAgentStride * config_.lbf.n_agents;
  total_food_level_ = 0.0;
  for (int j = 0; j < config_.lbf.n_foods; ++j) total_food_level_ += state_.values[base + kFoodStride * j + 2];
  finished_ = steps_ >= config_.lbf.episode_limit || total_food_level_ == 0.0;
}

bool LbfEnv::cell_blocked(int row, int col, int ignore_agent) const {
  const auto& c = config_.lbf;
  if (row < 0 || col < 0 || row >= c.grid_size || col >= c.grid_size) return true;
  const auto& v = state_.values;
  for (int i = 0; i < c.n_agents; ++i) {
    if (i == ignore_agent) continue;
    if (v[kAgentStride * i] == row && v[kAgentStride * i + 1] == col) return true;
  }
  const int base = kAgentStride * c.n_agents;
  for (int j = 0; j < c.n_foods; ++j) {
    const double* f = &v[base + kFoodStride * j];
    if (f[2] > 0.0 && f[0] == row && f[1] == col) return true;
  }
  return false;
}

StepResult LbfEnv::step(const JointAction& action) {
  const auto& c = config_.lbf;
  if (static_cast<int>(action.actions.size()) != c.n_agents) {
    throw ContractViolation("joint action has " + std::to_string(action.actions.size()) +
                            " entries, expected " + std::to_string(c.n_agents));
  }
  for (int a : action.actions) {
    if (a < 0 || a >= kLbfActionCount) throw ContractViolation("LBF action index out of range: " + std::to_string(a));
  }
  if (finished_) throw ContractViolation("step called on a finished episode; reset first");

  auto& v = state_.values;
  // Sequential resolution in agent-index order; a blocked move leaves the agent in place.
  for (int i = 0; i < c.n_agents; ++i) {
    const Cell d = move_delta(action.actions[i]);
    if (d.row == 0 && d.col == 0) continue;
    const int row = static_cast<int>(v[kAgentStride * i]) + d.row;
    const int col = static_cast<int>(v[kAgentStride * i + 1]) + d.col;
    if (!cell_blocked(row, col, i)) {
      v[kAgentStride * i] = row;
      v[kAgentStride * i + 1] = col;
    }
  }

  double reward = 0.0;
  int remaining = 0;
  const int base = kAgentStride * c.n_agents;
  for (int j = 0; j < c.n_foods; ++j) {
    double* f = &v[base + kFoodStride * j];
    if (f[2] <= 0.0) continue;
    double loading_level = 0.0;
    int loaders = 0;
    for (int i = 0; i < c.n_agents; ++i) {
      if (action.actions[i] != kLoad) continue;
      const double dist = std::abs(v[kAgentStride * i] - f[0]) + std::abs(v[kAgentStride * i + 1] - f[1]);
      if (dist == 1.0) {
        loading_level += v[kAgentStride * i + 2];
        ++loaders;
      }
    }
    if (loaders > 0 && loading_level >= f[2]) {
      reward += f[2] / total_food_level_;
      f[2] = 0.0;
    } else {
      ++remaining;
    }
  }

  ++steps_;
  StepResult result;
  result.terminated = remaining == 0;
  result.done = result.terminated || steps_ >= c.episode_limit;
  finished_ = result.done;
  result.reward = reward;
  result.next_state = state_;
  result.info["foods_remaining"] = remaining;
  return result;
}

}  // namespace yolo::envs
