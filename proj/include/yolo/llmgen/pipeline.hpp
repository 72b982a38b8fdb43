#ifndef YOLO_LLMGEN_PIPELINE_HPP_
#define YOLO_LLMGEN_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "yolo/envs/environment.hpp"
#include "yolo/llmgen/prompt.hpp"
#include "yolo/llmgen/store.hpp"
#include "yolo/llmgen/transport.hpp"
#include "yolo/plan/artifact.hpp"
#include "yolo/plan/validate.hpp"

namespace yolo::llmgen {

// Returns the completion verbatim and stores it under the strategy prompt
// hash; a stored completion is reused without a call. Throws OfflineError in
// offline mode (before touching the transport) and NetworkError on transport
// failure.
std::string generate_strategy(const PromptBundle& bundle, const LlmConfig& config, Transport& transport,
                              ArtifactStore& store, envs::EnvId env);

// First fenced block of the completion, with its language tag.
struct CodeBlock {
  std::string language;
  std::string code;
};
std::optional<CodeBlock> extract_code_block(std::string_view completion);
// argv for a code block; python is the only supported language.
std::vector<std::string> launch_for(const CodeBlock& block);

struct GenerationOptions {
  int n_validation_samples = 100;
  std::uint64_t validation_seed = 0;
  plan::ValidationOptions validation;
  // Stamped into created_at; defaults to the current UTC time.
  std::function<std::string()> clock;
};

struct GenerationResult {
  plan::PlanningArtifact artifact;
  bool cache_hit = false;
  int attempts = 0;  // API calls made in this stage
  plan::ValidationReport report;
};

// Sends the chained prompt, extracts and validates the planner and retries
// with the failure report appended, up to max_retries further attempts. Only
// a validated artifact is stored. A stored artifact for the same prompt hash
// is returned without a call. Throws GenerationError when every attempt
// fails, OfflineError when offline with nothing cached.
GenerationResult generate_planning_function(const PromptBundle& bundle, const LlmConfig& config,
                                            const envs::EnvConfig& env, Transport& transport, ArtifactStore& store,
                                            const GenerationOptions& options = {});

struct PipelineOptions {
  bool skip_strategy = false;
  GenerationOptions generation;
};

struct PipelineResult {
  GenerationResult generation;
  std::optional<std::string> strategy;
  int strategy_calls = 0;
};

// Strategy stage (unless skipped) then planning function generation.
PipelineResult run_pipeline(const envs::EnvConfig& env, const LlmConfig& config, Transport& transport,
                            ArtifactStore& store, const PipelineOptions& options = {});

}  // namespace yolo::llmgen

#endif  // YOLO_LLMGEN_PIPELINE_HPP_
