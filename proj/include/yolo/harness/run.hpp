#ifndef YOLO_HARNESS_RUN_HPP_
#define YOLO_HARNESS_RUN_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "yolo/harness/config.hpp"
#include "yolo/marl/policy.hpp"

namespace yolo::harness {

struct SeedRun {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::vector<marl::MetricsRow> metrics;
  bool fell_back = false;
};

// One directory per seed under output_dir, named
// <env>-<algorithm>-<variant>-seed<k>, with a numeric suffix when that name is
// taken; existing directories are never written to. Each holds config.json,
// run.json (planner provenance, schema version), metrics.csv and checkpoints/.
// Throws ConfigError for an invalid config or unknown artifact and
// TrainingAborted when a run aborts.
std::vector<SeedRun> train_runs(const RunConfig& config);

// "yolo" with a planner and shaping on, "baseline" otherwise.
std::string variant_name(const RunConfig& config);

// Rebuilds the greedy policy of a finished run directory.
std::unique_ptr<marl::Policy> load_policy(const std::filesystem::path& run_dir);
RunConfig load_run_dir_config(const std::filesystem::path& run_dir);

}  // namespace yolo::harness

#endif  // YOLO_HARNESS_RUN_HPP_
