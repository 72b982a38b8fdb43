#include "yolo/plan/reference.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "yolo/common/error.hpp"

namespace yolo::plan {
namespace {

using envs::EnvId;

struct Step {
  int action;
  int dr, dc;
};
constexpr Step kMoves[] = {{envs::kNorth, -1, 0}, {envs::kSouth, 1, 0}, {envs::kWest, 0, -1}, {envs::kEast, 0, 1}};

ActionSet manhattan_moves(const interp::Relation& rel) {
  ActionSet moves;
  if (rel.offset[0] < 0) moves.insert(envs::kNorth);
  if (rel.offset[0] > 0) moves.insert(envs::kSouth);
  if (rel.offset[1] < 0) moves.insert(envs::kWest);
  if (rel.offset[1] > 0) moves.insert(envs::kEast);
  return moves;
}

// Moves onto a shortest free path from the agent to a free cell next to food
// j. Other agents and active foods are obstacles. Empty when no such path
// exists.
ActionSet path_moves(const interp::InterpretedState& state, int agent, int j, int grid) {
  std::vector<int> blocked(grid * grid, 0);
  auto cell = [&](const interp::Vec2& p) {
    return static_cast<int>(std::lround(p[0])) * grid + static_cast<int>(std::lround(p[1]));
  };
  for (const auto& a : state.agents) {
    if (a.id != agent) blocked[cell(a.position)] = 1;
  }
  for (const auto& t : state.targets) {
    if (t.active) blocked[cell(t.position)] = 1;
  }
  constexpr int kFar = std::numeric_limits<int>::max();
  std::vector<int> dist(grid * grid, kFar);
  std::vector<int> queue;
  const int fr = static_cast<int>(std::lround(state.targets[j].position[0]));
  const int fc = static_cast<int>(std::lround(state.targets[j].position[1]));
  for (const auto& m : kMoves) {
    const int r = fr + m.dr;
    const int c = fc + m.dc;
    if (r < 0 || r >= grid || c < 0 || c >= grid || blocked[r * grid + c]) continue;
    dist[r * grid + c] = 0;
    queue.push_back(r * grid + c);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int r = queue[head] / grid;
    const int c = queue[head] % grid;
    for (const auto& m : kMoves) {
      const int nr = r + m.dr;
      const int nc = c + m.dc;
      if (nr < 0 || nr >= grid || nc < 0 || nc >= grid) continue;
      const int k = nr * grid + nc;
      if (blocked[k] || dist[k] != kFar) continue;
      dist[k] = dist[queue[head]] + 1;
      queue.push_back(k);
    }
  }
  ActionSet moves;
  const int here = cell(state.agents[agent].position);
  if (dist[here] == kFar) return moves;
  const int r = here / grid;
  const int c = here % grid;
  for (const auto& m : kMoves) {
    const int nr = r + m.dr;
    const int nc = c + m.dc;
    if (nr < 0 || nr >= grid || nc < 0 || nc >= grid) continue;
    const int k = nr * grid + nc;
    if (!blocked[k] && dist[k] == dist[here] - 1) moves.insert(m.action);
  }
  return moves;
}

AssignmentVector plan_lbf(const interp::InterpretedState& state) {
  const int n = static_cast<int>(state.agents.size());
  int best = -1;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < state.targets.size(); ++j) {
    if (!state.targets[j].active) continue;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += state.relative[i][j].distance;
    if (sum < best_sum) {
      best_sum = sum;
      best = static_cast<int>(j);
    }
  }
  if (best < 0) return AssignmentVector(n, Assignment::none());
  bool all_adjacent = true;
  for (int i = 0; i < n; ++i) all_adjacent = all_adjacent && state.relative[i][best].adjacent;
  return AssignmentVector(n, all_adjacent ? Assignment::load() : Assignment::food(best));
}

AssignmentVector plan_mpe(const interp::InterpretedState& state) {
  const int n = static_cast<int>(state.agents.size());
  const int m = static_cast<int>(state.targets.size());
  AssignmentVector out(n, Assignment::no_action());
  std::vector<bool> agent_done(n, false);
  std::vector<bool> landmark_done(m, false);
  for (int round = 0; round < std::min(n, m); ++round) {
    int bi = -1;
    int bj = -1;
    double bd = std::numeric_limits<double>::infinity();
    // Row-major scan with strict < keeps the lowest (agent, landmark) pair on ties.
    for (int i = 0; i < n; ++i) {
      if (agent_done[i]) continue;
      for (int j = 0; j < m; ++j) {
        if (landmark_done[j]) continue;
        if (state.relative[i][j].distance < bd) {
          bd = state.relative[i][j].distance;
          bi = i;
          bj = j;
        }
      }
    }
    agent_done[bi] = true;
    landmark_done[bj] = true;
    out[bi] = Assignment::landmark(bj);
  }
  return out;
}

}  // namespace

AssignmentVector plan_reference(const interp::InterpretedState& state, const envs::EnvSpec& spec) {
  return spec.env_id == EnvId::kLbf ? plan_lbf(state) : plan_mpe(state);
}

ActionSet admissible_actions(const interp::InterpretedState& state, int agent, const Assignment& assignment,
                             const envs::EnvSpec& spec) {
  if (agent < 0 || agent >= static_cast<int>(state.agents.size())) {
    throw ContractViolation("agent index out of range: " + std::to_string(agent));
  }
  if (!is_valid(assignment, spec)) {
    throw ContractViolation("assignment " + assignment.label() + " is not valid for " +
                            std::string(envs::to_string(spec.env_id)));
  }
  if (spec.env_id == EnvId::kLbf) {
    switch (assignment.kind) {
      case AssignmentKind::kLoad:
        return {envs::kLoad};
      case AssignmentKind::kFood: {
        const int j = assignment.target;
        if (!state.targets[j].active) return {envs::kNone};
        const auto& rel = state.relative[agent][j];
        if (rel.adjacent) return {envs::kLoad, envs::kNone};
        if (spec.grid_size > 0) {
          const auto moves = path_moves(state, agent, j, spec.grid_size);
          if (!moves.empty()) return moves;
        }
        return manhattan_moves(rel);
      }
      default:
        return {envs::kNone};
    }
  }
  if (assignment.kind != AssignmentKind::kLandmark) return {envs::kNoAction};
  const auto& rel = state.relative[agent][assignment.target];
  ActionSet moves;
  if (rel.offset[0] > kMpeDeadBand) moves.insert(envs::kMoveRight);
  if (rel.offset[0] < -kMpeDeadBand) moves.insert(envs::kMoveLeft);
  if (rel.offset[1] > kMpeDeadBand) moves.insert(envs::kMoveUp);
  if (rel.offset[1] < -kMpeDeadBand) moves.insert(envs::kMoveDown);
  if (moves.empty()) moves.insert(envs::kNoAction);
  return moves;
}

}  // namespace yolo::plan
