#include "yolo/plan/assignment.hpp"

#include <algorithm>

namespace yolo::plan {

std::string Assignment::label() const {
  switch (kind) {
    case AssignmentKind::kNone:
      return "None";
    case AssignmentKind::kFood:
      return "Food" + std::to_string(target);
    case AssignmentKind::kLoad:
      return "Load";
    case AssignmentKind::kLandmark:
      return "Landmark" + std::to_string(target);
    case AssignmentKind::kNoAction:
      return "NoAction";
  }
  return "?";
}

std::optional<Assignment> parse_assignment(std::string_view label, const envs::EnvSpec& spec) {
  const auto& set = spec.assignment_set;
  if (std::find(set.begin(), set.end(), label) == set.end()) return std::nullopt;
  if (label == "None") return Assignment::none();
  if (label == "Load") return Assignment::load();
  if (label == "NoAction") return Assignment::no_action();
  auto indexed = [&](std::string_view prefix) -> std::optional<int> {
    if (label.substr(0, prefix.size()) != prefix) return std::nullopt;
    return std::stoi(std::string(label.substr(prefix.size())));
  };
  if (auto j = indexed("Food")) return Assignment::food(*j);
  if (auto j = indexed("Landmark")) return Assignment::landmark(*j);
  return std::nullopt;
}

bool is_valid(const Assignment& a, const envs::EnvSpec& spec) {
  const auto& set = spec.assignment_set;
  return std::find(set.begin(), set.end(), a.label()) != set.end();
}

std::vector<int> ActionSet::to_vector() const {
  std::vector<int> out;
  for (int a = 0; a < 32; ++a) {
    if (contains(a)) out.push_back(a);
  }
  return out;
}

}  // namespace yolo::plan
