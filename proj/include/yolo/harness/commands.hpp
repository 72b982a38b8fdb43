#ifndef YOLO_HARNESS_COMMANDS_HPP_
#define YOLO_HARNESS_COMMANDS_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "yolo/harness/config.hpp"
#include "yolo/llmgen/pipeline.hpp"
#include "yolo/nn/gradcheck.hpp"

namespace yolo::harness {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitTraining = 3, kExitGeneration = 4 };

struct GenerateOptions {
  envs::EnvConfig env;
  llmgen::LlmConfig llm;
  std::filesystem::path artifact_dir = "artifacts";
  bool skip_strategy = false;
  std::uint64_t validation_seed = 0;
};

// Runs the generation pipeline through `transport` and prints the artifact
// hash. Returns an exit code; errors are written to `err`.
int cmd_generate(const GenerateOptions& options, llmgen::Transport& transport, std::ostream& out, std::ostream& err);

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);

int cmd_eval(const std::filesystem::path& run_dir, int episodes, std::uint64_t seed, std::ostream& out,
             std::ostream& err);

int cmd_compare(const std::vector<std::filesystem::path>& baseline, const std::vector<std::filesystem::path>& yolo,
                const std::vector<long>& checkpoints, const std::filesystem::path& output_dir, std::ostream& out,
                std::ostream& err);

int cmd_gradcheck(int n_nets, std::uint64_t seed, std::ostream& out, const nn::GradientHook& hook = {});

}  // namespace yolo::harness

#endif  // YOLO_HARNESS_COMMANDS_HPP_
