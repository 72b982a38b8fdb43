#ifndef YOLO_LLMGEN_STORE_HPP_
#define YOLO_LLMGEN_STORE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "yolo/plan/artifact.hpp"

namespace yolo::llmgen {

// Content-addressed artifacts under <root>/<env_id>/<prompt_hash>.json, each
// with a sibling directory holding strategy.txt and planner_source.txt for
// reading. Files carry a SHA-256 of the artifact body; a mismatch on read
// throws IntegrityError naming the file. Writes go through a temporary file
// and a rename.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Returns the key (the artifact's prompt_hash). Throws ContractViolation for
  // reference artifacts, which need no storage.
  std::string put(const plan::PlanningArtifact& artifact);
  std::optional<plan::PlanningArtifact> get(envs::EnvId env, const std::string& hash) const;
  // Most recent by created_at, then hash.
  std::optional<plan::PlanningArtifact> latest(envs::EnvId env) const;
  std::vector<std::string> list(envs::EnvId env) const;
  // Resolves a hash across every environment.
  std::optional<plan::PlanningArtifact> find(const std::string& hash) const;

  // Strategy completions keyed by their prompt hash.
  void put_strategy(envs::EnvId env, const std::string& hash, const std::string& text);
  std::optional<std::string> get_strategy(envs::EnvId env, const std::string& hash) const;

 private:
  std::filesystem::path env_dir(envs::EnvId env) const;

  std::filesystem::path root_;
};

}  // namespace yolo::llmgen

#endif  // YOLO_LLMGEN_STORE_HPP_
