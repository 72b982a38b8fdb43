#ifndef YOLO_PLAN_VALIDATE_HPP_
#define YOLO_PLAN_VALIDATE_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>

#include "yolo/envs/environment.hpp"
#include "yolo/plan/artifact.hpp"
#include "yolo/plan/external.hpp"

namespace yolo::plan {

struct ValidationReport {
  int n_samples = 0;
  int checked = 0;
  int invalid_labels = 0;
  int protocol_errors = 0;
  int timeouts = 0;
  int exceptions = 0;
  // Samples not attempted after the planner became unrecoverable.
  int skipped = 0;
  std::string first_error;

  int failures() const { return invalid_labels + protocol_errors + timeouts + exceptions + skipped; }
  bool passed() const { return failures() == 0 && checked == n_samples; }
  // One-paragraph summary, suitable for feeding back into a prompt.
  std::string summary() const;
};

struct ValidationOptions {
  std::chrono::milliseconds timeout = kDefaultPlannerTimeout;
  // Scratch directory for materialised sources.
  std::filesystem::path work_dir = std::filesystem::temp_directory_path() / "yolo_marl_validate";
  // Restart budget after crashes or timeouts before the rest is skipped.
  int max_restarts = 2;
};

// Runs the planner on `n_samples` states drawn from resets plus uniformly
// random rollouts of `config`. Planner failures are tallied, never thrown.
ValidationReport validate_artifact(const PlanningArtifact& artifact, const envs::EnvConfig& config, int n_samples,
                                   std::uint64_t seed, const ValidationOptions& options = {});

// The sampled states used by validate_artifact, exposed for fuzz tests.
std::vector<envs::GlobalState> sample_states(const envs::EnvConfig& config, int n_samples, std::uint64_t seed);

}  // namespace yolo::plan

#endif  // YOLO_PLAN_VALIDATE_HPP_
