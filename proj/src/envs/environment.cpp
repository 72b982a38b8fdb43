#include "yolo/envs/environment.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "yolo/common/error.hpp"
#include "yolo/envs/lbf.hpp"
#include "yolo/envs/mpe_spread.hpp"

namespace yolo::envs {

std::string_view to_string(EnvId id) {
  switch (id) {
    case EnvId::kLbf:
      return "lbf";
    case EnvId::kMpeSpread:
      return "mpe_spread";
  }
  return "unknown";
}

EnvId env_id_from_string(std::string_view text) {
  if (text == "lbf") return EnvId::kLbf;
  if (text == "mpe_spread") return EnvId::kMpeSpread;
  throw ConfigError("unknown environment id '" + std::string(text) +
                    "' (expected lbf or mpe_spread)");
}

void EnvConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("env." + field + ": " + why);
  };
  if (id == EnvId::kLbf) {
    const auto& c = lbf;
    if (c.grid_size < 3) fail("grid_size", "must be >= 3");
    if (c.n_agents < 1) fail("n_agents", "must be >= 1");
    if (c.n_foods < 1) fail("n_foods", "must be >= 1");
    if (c.n_foods >= c.grid_size * c.grid_size) fail("n_foods", "must be smaller than the number of grid cells");
    if (c.n_foods + c.n_agents > c.grid_size * c.grid_size) fail("n_agents", "agents and foods do not fit on the grid");
    if (static_cast<int>(c.agent_levels.size()) != c.n_agents) fail("agent_levels", "needs one level per agent");
    for (int level : c.agent_levels) {
      if (level < 1) fail("agent_levels", "levels must be >= 1");
    }
    if (c.episode_limit < 1) fail("episode_limit", "must be >= 1");
  } else {
    const auto& c = mpe;
    if (c.n_agents < 1) fail("n_agents", "must be >= 1");
    if (!(c.dt > 0.0)) fail("dt", "must be > 0");
    if (!(c.damping >= 0.0 && c.damping < 1.0)) fail("damping", "must be in [0, 1)");
    if (!(c.accel > 0.0)) fail("accel", "must be > 0");
    if (!(c.max_speed > 0.0)) fail("max_speed", "must be > 0");
    if (!(c.world_extent > 0.0)) fail("world_extent", "must be > 0");
    if (!(c.collision_radius >= 0.0)) fail("collision_radius", "must be >= 0");
    if (!(c.collision_penalty >= 0.0)) fail("collision_penalty", "must be >= 0");
    if (c.episode_limit < 1) fail("episode_limit", "must be >= 1");
  }
}

EnvSpec make_spec(const EnvConfig& config) {
  EnvSpec spec;
  spec.env_id = config.id;
  if (config.id == EnvId::kLbf) {
    const auto& c = config.lbf;
    spec.n_agents = c.n_agents;
    spec.n_targets = c.n_foods;
    spec.action_set = {"NONE", "NORTH", "SOUTH", "WEST", "EAST", "LOAD"};
    spec.assignment_set.push_back("None");
    for (int j = 0; j < c.n_foods; ++j) spec.assignment_set.push_back("Food" + std::to_string(j));
    spec.assignment_set.push_back("Load");
    spec.episode_limit = c.episode_limit;
    spec.grid_size = c.grid_size;
    for (int i = 0; i < c.n_agents; ++i) {
      const std::string p = "agent" + std::to_string(i);
      spec.state_layout.push_back({p + ".row", "grid cells"});
      spec.state_layout.push_back({p + ".col", "grid cells"});
      spec.state_layout.push_back({p + ".level", "level"});
    }
    for (int j = 0; j < c.n_foods; ++j) {
      const std::string p = "food" + std::to_string(j);
      spec.state_layout.push_back({p + ".row", "grid cells"});
      spec.state_layout.push_back({p + ".col", "grid cells"});
      spec.state_layout.push_back({p + ".level", "level (0 once collected)"});
    }
  } else {
    const auto& c = config.mpe;
    spec.n_agents = c.n_agents;
    spec.n_targets = c.n_agents;
    spec.action_set = {"no_action", "move_left", "move_right", "move_down", "move_up"};
    for (int j = 0; j < c.n_agents; ++j) spec.assignment_set.push_back("Landmark" + std::to_string(j));
    spec.assignment_set.push_back("NoAction");
    spec.episode_limit = c.episode_limit;
    for (int i = 0; i < c.n_agents; ++i) {
      const std::string p = "agent" + std::to_string(i);
      spec.state_layout.push_back({p + ".x", "world units"});
      spec.state_layout.push_back({p + ".y", "world units"});
      spec.state_layout.push_back({p + ".vx", "world units/step"});
      spec.state_layout.push_back({p + ".vy", "world units/step"});
    }
    for (int j = 0; j < c.n_agents; ++j) {
      const std::string p = "landmark" + std::to_string(j);
      spec.state_layout.push_back({p + ".x", "world units"});
      spec.state_layout.push_back({p + ".y", "world units"});
    }
  }
  return spec;
}

void check_state(const EnvSpec& spec, const GlobalState& state) {
  if (state.values.size() != spec.state_size()) {
    throw ContractViolation("state has " + std::to_string(state.values.size()) +
                            " values, layout for " + std::string(to_string(spec.env_id)) +
                            " expects " + std::to_string(spec.state_size()));
  }
  for (double v : state.values) {
    if (!std::isfinite(v)) throw ContractViolation("state contains a non-finite value");
  }
}

std::unique_ptr<Environment> make_environment(const EnvConfig& config) {
  if (config.id == EnvId::kLbf) return std::make_unique<LbfEnv>(config);
  return std::make_unique<MpeSpreadEnv>(config);
}

double episode_return(std::span<const double> rewards) {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

namespace {

void render_spec(std::ostringstream& out, const std::string& title, const EnvSpec& spec) {
  out << "## " << title << "\n\n";
  out << "Actions: ";
  for (std::size_t k = 0; k < spec.action_set.size(); ++k) {
    out << (k ? ", " : "") << k << "=" << spec.action_set[k];
  }
  out << "\n\nAssignments: ";
  for (std::size_t k = 0; k < spec.assignment_set.size(); ++k) {
    out << (k ? ", " : "") << spec.assignment_set[k];
  }
  out << "\n\n| index | component | unit |\n|---:|---|---|\n";
  for (std::size_t k = 0; k < spec.state_layout.size(); ++k) {
    out << "| " << k << " | " << spec.state_layout[k].name << " | " << spec.state_layout[k].unit << " |\n";
  }
  out << "\n";
}

}  // namespace

std::string render_state_layouts_markdown() {
  std::ostringstream out;
  out << "# Global state layouts\n\n"
      << "Generated by `yolo_marl docs`; do not edit by hand.\n\n"
      << "LBF rows grow southwards (NORTH decreases the row) and columns grow eastwards.\n"
      << "MPE positions live in [-extent, extent]^2 with +x to the right and +y upwards.\n\n";
  EnvConfig lbf;
  render_spec(out, "lbf (default 8x8, 2 agents, 2 foods)", make_spec(lbf));
  for (int n : {3, 4}) {
    EnvConfig mpe;
    mpe.id = EnvId::kMpeSpread;
    mpe.mpe.n_agents = n;
    render_spec(out, "mpe_spread (" + std::to_string(n) + " agents, " + std::to_string(n) + " landmarks)",
                make_spec(mpe));
  }
  return out.str();
}

}  // namespace yolo::envs
