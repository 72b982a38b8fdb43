#include "yolo/plan/planner.hpp"

#include "yolo/common/error.hpp"

namespace yolo::plan {

ExternalPlanner::ExternalPlanner(const PlanningArtifact& artifact, const envs::EnvSpec& spec,
                                 const std::filesystem::path& work_dir, std::chrono::milliseconds timeout) {
  if (artifact.kind != ArtifactKind::kExternal) throw ContractViolation("ExternalPlanner needs an external artifact");
  if (artifact.env_id != spec.env_id) throw ContractViolation("artifact was generated for a different environment");
  session_ = std::make_unique<PlannerSession>(materialize_launch(artifact, work_dir), spec, timeout);
  description_ = "artifact:" + artifact.prompt_hash;
}

AssignmentVector ExternalPlanner::plan(const interp::InterpretedState& state) {
  return run_external_planner(*session_, state);
}

AssignmentVector run_external_planner(PlannerSession& session, const interp::InterpretedState& state) {
  return session.request(state);
}

std::unique_ptr<Planner> make_planner(const PlanningArtifact& artifact, const envs::EnvSpec& spec,
                                      const std::filesystem::path& work_dir, std::chrono::milliseconds timeout) {
  if (artifact.kind == ArtifactKind::kReference) return std::make_unique<ReferencePlanner>(spec);
  return std::make_unique<ExternalPlanner>(artifact, spec, work_dir, timeout);
}

}  // namespace yolo::plan
