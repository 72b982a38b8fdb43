#ifndef YOLO_PLAN_ARTIFACT_HPP_
#define YOLO_PLAN_ARTIFACT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yolo/envs/environment.hpp"

namespace yolo::plan {

enum class ArtifactKind { kReference, kExternal };

// Placeholder in PlanningArtifact::launch replaced by the path of the
// materialised source file.
inline constexpr std::string_view kSourcePlaceholder = "{source}";

// Where a planning function came from and how to run it.
struct PlanningArtifact {
  ArtifactKind kind = ArtifactKind::kReference;
  envs::EnvId env_id = envs::EnvId::kLbf;
  // Generated program for external artifacts; "builtin:reference" otherwise.
  std::string source_text = "builtin:reference";
  std::optional<std::string> strategy_text;
  // Content hash of the planning prompt; empty for reference artifacts.
  std::string prompt_hash;
  std::string created_at;
  std::optional<std::string> model_id;
  // argv for external planners, e.g. {"python3", "{source}"}.
  std::vector<std::string> launch;

  static PlanningArtifact reference(envs::EnvId env);

  // Throws ContractViolation if provenance fields disagree with `kind`.
  void check() const;

  bool operator==(const PlanningArtifact&) const = default;
};

nlohmann::json to_json(const PlanningArtifact& artifact);
PlanningArtifact artifact_from_json(const nlohmann::json& j);

// Writes source_text to `dir`/planner_source.txt (when launch refers to it)
// and returns the argv with the placeholder substituted.
std::vector<std::string> materialize_launch(const PlanningArtifact& artifact, const std::filesystem::path& dir);

}  // namespace yolo::plan

#endif  // YOLO_PLAN_ARTIFACT_HPP_
