#ifndef YOLO_INTERP_INTERPRET_HPP_
#define YOLO_INTERP_INTERPRET_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yolo/envs/environment.hpp"

namespace yolo::interp {

// (row, col) on the LBF grid, (x, y) in the MPE world.
using Vec2 = std::array<double, 2>;

struct AgentView {
  int id = 0;
  Vec2 position{};
  std::optional<int> level;     // LBF only
  std::optional<Vec2> velocity;  // MPE only

  bool operator==(const AgentView&) const = default;
};

enum class TargetKind { kFood, kLandmark };

struct TargetView {
  int id = 0;
  TargetKind kind = TargetKind::kFood;
  Vec2 position{};
  std::optional<int> level;  // LBF only
  bool active = true;

  bool operator==(const TargetView&) const = default;
};

// Offset is target minus agent. Distance is Manhattan on the grid and
// Euclidean in the particle world; `adjacent` means Manhattan distance 1
// and is always false for MPE.
struct Relation {
  Vec2 offset{};
  double distance = 0.0;
  bool adjacent = false;

  bool operator==(const Relation&) const = default;
};

struct InterpretedState {
  envs::EnvId env = envs::EnvId::kLbf;
  std::vector<AgentView> agents;
  std::vector<TargetView> targets;
  // relative[i][j]: agent i to target j
  std::vector<std::vector<Relation>> relative;

  bool operator==(const InterpretedState&) const = default;
};

Relation relate(envs::EnvId env, const Vec2& agent, const Vec2& target);

// Throws InterpretationError if the state does not fit the EnvSpec layout.
InterpretedState interpret(const envs::GlobalState& state, const envs::EnvSpec& spec);

// Human-readable rendering of `interpret` for the given environment. Stable
// byte-for-byte across runs; used verbatim as a prompt section.
std::string interpretation_source(const envs::EnvSpec& spec);

// Canonical structured form: sorted keys, integers on the grid.
nlohmann::json to_json(const InterpretedState& state);
std::string serialize(const InterpretedState& state);
// Inverse of to_json. Throws InterpretationError on malformed input.
InterpretedState from_json(const nlohmann::json& j);

}  // namespace yolo::interp

#endif  // YOLO_INTERP_INTERPRET_HPP_
