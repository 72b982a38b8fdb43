#ifndef YOLO_ENVS_ENVIRONMENT_HPP_
#define YOLO_ENVS_ENVIRONMENT_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace yolo::envs {

enum class EnvId { kLbf, kMpeSpread };

// "lbf" / "mpe_spread", the identifiers used in config files and the planner protocol.
std::string_view to_string(EnvId id);
EnvId env_id_from_string(std::string_view text);

// LBF action indices. NORTH decreases the row, EAST increases the column.
enum LbfAction : int { kNone = 0, kNorth, kSouth, kWest, kEast, kLoad, kLbfActionCount };

// MPE spread action indices.
enum MpeAction : int {
  kNoAction = 0,
  kMoveLeft,
  kMoveRight,
  kMoveDown,
  kMoveUp,
  kMpeActionCount
};

struct LayoutEntry {
  std::string name;
  std::string unit;
};

struct EnvSpec {
  EnvId env_id = EnvId::kLbf;
  int n_agents = 0;
  // foods for LBF, landmarks for MPE
  int n_targets = 0;
  std::vector<std::string> action_set;
  std::vector<std::string> assignment_set;
  int episode_limit = 1;
  // LBF grid side length; 0 for MPE.
  int grid_size = 0;
  // state_layout[k] describes GlobalState::values[k]
  std::vector<LayoutEntry> state_layout;

  std::size_t state_size() const { return state_layout.size(); }
  int n_actions() const { return static_cast<int>(action_set.size()); }
};

struct LbfConfig {
  int grid_size = 8;
  int n_agents = 2;
  int n_foods = 2;
  bool force_coop = true;
  std::vector<int> agent_levels = {1, 1};
  int episode_limit = 50;
};

struct MpeConfig {
  int n_agents = 3;
  double dt = 0.1;
  double damping = 0.25;
  double accel = 5.0;
  double max_speed = 1.3;
  double world_extent = 1.0;
  double collision_radius = 0.15;
  double collision_penalty = 1.0;
  int episode_limit = 25;
};

struct EnvConfig {
  EnvId id = EnvId::kLbf;
  LbfConfig lbf;
  MpeConfig mpe;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError naming the first invalid field.
  void validate() const;
  int n_agents() const { return id == EnvId::kLbf ? lbf.n_agents : mpe.n_agents; }
  int episode_limit() const {
    return id == EnvId::kLbf ? lbf.episode_limit : mpe.episode_limit;
  }
};

struct GlobalState {
  std::vector<double> values;

  bool operator==(const GlobalState&) const = default;
};

struct JointAction {
  std::vector<int> actions;
};

struct StepResult {
  GlobalState next_state;
  // Shared environment reward for the transition.
  double reward = 0.0;
  // Episode over (terminal condition or step limit).
  bool done = false;
  // True terminal condition only; a step-limit cut leaves this false.
  bool terminated = false;
  std::map<std::string, double> info;
};

EnvSpec make_spec(const EnvConfig& config);

// Throws ContractViolation unless the state matches the EnvSpec layout.
void check_state(const EnvSpec& spec, const GlobalState& state);

class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual const EnvConfig& config() const = 0;

  // Deterministic in `seed`.
  virtual GlobalState reset(std::uint64_t seed) = 0;
  GlobalState reset() { return reset(config().rng_seed); }

  // Throws ContractViolation for a malformed joint action or a finished episode.
  virtual StepResult step(const JointAction& action) = 0;

  // Overwrites the current state; used to stage specific situations.
  virtual void set_state(const GlobalState& state, int steps_taken) = 0;

  virtual const GlobalState& state() const = 0;
  virtual int steps_taken() const = 0;
};

std::unique_ptr<Environment> make_environment(const EnvConfig& config);

// Undiscounted sum of environment rewards for one episode.
double episode_return(std::span<const double> rewards);

// Markdown reference for the GlobalState layout of every supported environment.
std::string render_state_layouts_markdown();

}  // namespace yolo::envs

#endif  // YOLO_ENVS_ENVIRONMENT_HPP_
