#ifndef YOLO_HARNESS_CONFIG_HPP_
#define YOLO_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yolo/llmgen/transport.hpp"
#include "yolo/marl/train.hpp"

namespace yolo::harness {

enum class PlannerKind { kReference, kArtifact, kNone };

struct PlannerChoice {
  PlannerKind kind = PlannerKind::kReference;
  std::string hash;  // for kArtifact

  // "reference", "none" or "artifact:<hash>".
  std::string to_string() const;
  static PlannerChoice parse(std::string_view text);  // throws ConfigError
};

struct RunConfig {
  envs::EnvConfig env;
  marl::Algorithm algorithm = marl::Algorithm::kMappo;
  marl::MappoConfig mappo;
  marl::QmixConfig qmix;
  shaping::ShapingConfig shaping;
  PlannerChoice planner;
  std::vector<std::uint64_t> seeds = {0};
  long total_steps = 200000;
  long eval_interval = 10000;
  int eval_episodes = 32;
  std::filesystem::path output_dir = "runs";
  std::filesystem::path artifact_dir = "artifacts";
  int planner_timeout_ms = 1000;
  bool fallback_to_reference = false;
  // Seeds trained concurrently.
  int jobs = 1;
  llmgen::LlmConfig llm;

  // Throws ConfigError naming the field.
  void validate() const;
  marl::TrainConfig train_config(std::uint64_t seed) const;
};

// Every field is optional and defaults as above; unknown fields and wrong
// types are errors. Throws ConfigError with the dotted field path.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

// One line per field: path, type, default and meaning.
std::string explain_config();

inline constexpr int kMetricsSchemaVersion = 1;

}  // namespace yolo::harness

#endif  // YOLO_HARNESS_CONFIG_HPP_
