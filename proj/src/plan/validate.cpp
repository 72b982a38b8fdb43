#include "yolo/plan/validate.hpp"

#include <memory>
#include <random>
#include <sstream>

#include "yolo/common/error.hpp"
#include "yolo/interp/interpret.hpp"
#include "yolo/plan/planner.hpp"

namespace yolo::plan {

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << (passed() ? "PASS" : "FAIL") << ": " << checked << "/" << n_samples << " states answered; "
      << invalid_labels << " invalid labels, " << protocol_errors << " protocol errors, " << timeouts << " timeouts, "
      << exceptions << " crashes, " << skipped << " skipped.";
  if (!first_error.empty()) out << " First error: " << first_error;
  return out.str();
}

std::vector<envs::GlobalState> sample_states(const envs::EnvConfig& config, int n_samples, std::uint64_t seed) {
  auto env = envs::make_environment(config);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(0, config.episode_limit() - 1);
  std::uniform_int_distribution<int> action(0, env->spec().n_actions() - 1);
  std::vector<envs::GlobalState> out;
  out.reserve(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    env->reset(rng());
    const int steps = length(rng);
    for (int t = 0; t < steps; ++t) {
      envs::JointAction joint;
      for (int i = 0; i < env->spec().n_agents; ++i) joint.actions.push_back(action(rng));
      if (env->step(joint).done) break;
    }
    out.push_back(env->state());
  }
  return out;
}

ValidationReport validate_artifact(const PlanningArtifact& artifact, const envs::EnvConfig& config, int n_samples,
                                   std::uint64_t seed, const ValidationOptions& options) {
  if (n_samples < 1) throw ContractViolation("validate_artifact needs n_samples >= 1");
  ValidationReport report;
  report.n_samples = n_samples;
  const auto spec = envs::make_spec(config);
  const auto states = sample_states(config, n_samples, seed);

  auto note = [&report](const std::string& message) {
    if (report.first_error.empty()) report.first_error = message;
  };

  std::unique_ptr<Planner> planner;
  int restarts = 0;
  auto start = [&]() -> bool {
    try {
      planner = make_planner(artifact, spec, options.work_dir, options.timeout);
      return true;
    } catch (const PlannerTimeout& e) {
      ++report.timeouts;
      note(e.what());
    } catch (const std::exception& e) {
      ++report.exceptions;
      note(std::string("planner failed to start: ") + e.what());
    }
    return false;
  };

  bool alive = start();
  for (int k = 0; k < n_samples; ++k) {
    if (!alive) {
      if (restarts >= options.max_restarts) {
        report.skipped = n_samples - k;
        break;
      }
      ++restarts;
      alive = start();
      if (!alive) {
        // The failed start is already counted; this sample is not attempted.
        ++report.skipped;
        continue;
      }
    }
    const auto state = interp::interpret(states[k], spec);
    try {
      const auto plan = planner->plan(state);
      if (static_cast<int>(plan.size()) != spec.n_agents) {
        ++report.invalid_labels;
        note("wrong number of assignments");
        continue;
      }
      bool ok = true;
      for (const auto& a : plan) ok = ok && is_valid(a, spec);
      if (!ok) {
        ++report.invalid_labels;
        note("assignment outside the assignment set");
        continue;
      }
      ++report.checked;
    } catch (const InvalidAssignmentLabel& e) {
      ++report.invalid_labels;
      note(e.what());
    } catch (const PlannerTimeout& e) {
      ++report.timeouts;
      note(e.what());
      alive = false;
    } catch (const PlannerProtocolError& e) {
      ++report.protocol_errors;
      note(e.what());
      alive = false;
    } catch (const std::exception& e) {
      ++report.exceptions;
      note(e.what());
      alive = false;
    }
  }
  return report;
}

}  // namespace yolo::plan
