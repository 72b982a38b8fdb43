#ifndef YOLO_PLAN_ASSIGNMENT_HPP_
#define YOLO_PLAN_ASSIGNMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yolo/envs/environment.hpp"

namespace yolo::plan {

enum class AssignmentKind { kNone, kFood, kLoad, kLandmark, kNoAction };

// High-level task for one agent. `target` indexes the food or landmark for
// kFood / kLandmark and is -1 otherwise.
struct Assignment {
  AssignmentKind kind = AssignmentKind::kNone;
  int target = -1;

  static Assignment none() { return {AssignmentKind::kNone, -1}; }
  static Assignment food(int j) { return {AssignmentKind::kFood, j}; }
  static Assignment load() { return {AssignmentKind::kLoad, -1}; }
  static Assignment landmark(int j) { return {AssignmentKind::kLandmark, j}; }
  static Assignment no_action() { return {AssignmentKind::kNoAction, -1}; }

  // Wire label: None, Food<j>, Load, Landmark<j>, NoAction.
  std::string label() const;

  bool operator==(const Assignment&) const = default;
};

using AssignmentVector = std::vector<Assignment>;

// Parses a wire label; nullopt unless it is a member of spec.assignment_set.
std::optional<Assignment> parse_assignment(std::string_view label, const envs::EnvSpec& spec);

bool is_valid(const Assignment& a, const envs::EnvSpec& spec);

// Small set of action indices (at most 32 actions).
class ActionSet {
 public:
  ActionSet() = default;
  ActionSet(std::initializer_list<int> actions) {
    for (int a : actions) insert(a);
  }

  void insert(int action) { bits_ |= (1u << action); }
  bool contains(int action) const { return action >= 0 && action < 32 && ((bits_ >> action) & 1u); }
  int size() const { return __builtin_popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::vector<int> to_vector() const;
  std::uint32_t bits() const { return bits_; }

  bool operator==(const ActionSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace yolo::plan

#endif  // YOLO_PLAN_ASSIGNMENT_HPP_
