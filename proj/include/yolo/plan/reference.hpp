#ifndef YOLO_PLAN_REFERENCE_HPP_
#define YOLO_PLAN_REFERENCE_HPP_

#include "yolo/envs/environment.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/plan/assignment.hpp"

namespace yolo::plan {

// Axis dead-band for MPE landmark alignment, in world units.
inline constexpr double kMpeDeadBand = 0.05;

// Built-in planning function.
//
// LBF: every agent is sent to the active food with the smallest summed
// Manhattan distance (lowest index on ties); once all agents are adjacent to
// it they are all told to Load. No active food leaves everyone on None.
//
// MPE: greedy matching. The globally closest (agent, free landmark) pair is
// fixed first, ties broken by (agent, landmark) index; the result is a
// permutation of landmarks.
AssignmentVector plan_reference(const interp::InterpretedState& state, const envs::EnvSpec& spec);

// Low-level actions that count as following `assignment` for `agent`.
//
// LBF Food(j): moves onto a free cell that strictly shrink the shortest-path
// distance to a free cell next to food j, treating other agents and active
// foods as walls (the Manhattan-shrinking moves when no such path exists);
// {LOAD, NONE} once adjacent; {NONE} if the food is gone. Load -> {LOAD},
// None -> {NONE}.
// MPE Landmark(j): per axis, the move that shrinks |dx| or |dy| when that
// offset exceeds the dead-band; {no_action} inside the dead-band on both
// axes. NoAction -> {no_action}.
ActionSet admissible_actions(const interp::InterpretedState& state, int agent, const Assignment& assignment,
                             const envs::EnvSpec& spec);

}  // namespace yolo::plan

#endif  // YOLO_PLAN_REFERENCE_HPP_
