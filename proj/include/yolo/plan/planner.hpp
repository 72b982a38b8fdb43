#ifndef YOLO_PLAN_PLANNER_HPP_
#define YOLO_PLAN_PLANNER_HPP_

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "yolo/plan/artifact.hpp"
#include "yolo/plan/external.hpp"
#include "yolo/plan/reference.hpp"

namespace yolo::plan {

// A planning function: interpreted state in, one assignment per agent out.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual AssignmentVector plan(const interp::InterpretedState& state) = 0;
  virtual std::string describe() const = 0;
};

class ReferencePlanner final : public Planner {
 public:
  explicit ReferencePlanner(envs::EnvSpec spec) : spec_(std::move(spec)) {}
  AssignmentVector plan(const interp::InterpretedState& state) override { return plan_reference(state, spec_); }
  std::string describe() const override { return "reference"; }

 private:
  envs::EnvSpec spec_;
};

class ExternalPlanner final : public Planner {
 public:
  ExternalPlanner(const PlanningArtifact& artifact, const envs::EnvSpec& spec, const std::filesystem::path& work_dir,
                  std::chrono::milliseconds timeout = kDefaultPlannerTimeout);
  AssignmentVector plan(const interp::InterpretedState& state) override;
  std::string describe() const override { return description_; }

 private:
  std::unique_ptr<PlannerSession> session_;
  std::string description_;
};

// Sends one request through an open session.
AssignmentVector run_external_planner(PlannerSession& session, const interp::InterpretedState& state);

std::unique_ptr<Planner> make_planner(const PlanningArtifact& artifact, const envs::EnvSpec& spec,
                                      const std::filesystem::path& work_dir,
                                      std::chrono::milliseconds timeout = kDefaultPlannerTimeout);

}  // namespace yolo::plan

#endif  // YOLO_PLAN_PLANNER_HPP_
