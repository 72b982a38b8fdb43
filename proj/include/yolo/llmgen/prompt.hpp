#ifndef YOLO_LLMGEN_PROMPT_HPP_
#define YOLO_LLMGEN_PROMPT_HPP_

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "yolo/envs/environment.hpp"

namespace yolo::llmgen {

// Sections of the two prompts. The planning prompt chains them in the fixed
// order env_description, strategy, interpretation_source, output_contract.
struct PromptBundle {
  std::string env_description;
  std::string guideline;
  std::optional<std::string> strategy;
  std::string interpretation_source;
  std::string output_contract;

  bool operator==(const PromptBundle&) const = default;
};

PromptBundle make_bundle(const envs::EnvSpec& spec);

// Environment description plus guideline; the strategy is not included.
std::string strategy_prompt(const PromptBundle& bundle);
// Throws ContractViolation if a required section is empty.
std::string planning_prompt(const PromptBundle& bundle);

// Byte-identical for identical bundles.
std::string serialize(const PromptBundle& bundle);
PromptBundle bundle_from_json(const nlohmann::json& j);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Hash over the prompt text and the model it is sent to.
std::string prompt_hash(std::string_view prompt, std::string_view model_id);

}  // namespace yolo::llmgen

#endif  // YOLO_LLMGEN_PROMPT_HPP_
