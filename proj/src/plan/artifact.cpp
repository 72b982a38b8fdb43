#include "yolo/plan/artifact.hpp"

#include <fstream>
#include <sstream>

#include "yolo/common/error.hpp"

namespace yolo::plan {

using nlohmann::json;

PlanningArtifact PlanningArtifact::reference(envs::EnvId env) {
  PlanningArtifact a;
  a.kind = ArtifactKind::kReference;
  a.env_id = env;
  a.source_text = "builtin:reference";
  return a;
}

void PlanningArtifact::check() const {
  if (kind == ArtifactKind::kExternal) {
    if (prompt_hash.empty()) throw ContractViolation("external artifact without prompt_hash");
    if (!model_id || model_id->empty()) throw ContractViolation("external artifact without model_id");
    if (launch.empty()) throw ContractViolation("external artifact without a launch command");
  } else {
    if (!prompt_hash.empty() || model_id) throw ContractViolation("reference artifact must not carry LLM provenance");
  }
}

json to_json(const PlanningArtifact& a) {
  json j = {{"kind", a.kind == ArtifactKind::kReference ? "reference" : "external"},
            {"env_id", std::string(envs::to_string(a.env_id))},
            {"source_text", a.source_text},
            {"prompt_hash", a.prompt_hash},
            {"created_at", a.created_at},
            {"launch", a.launch}};
  j["strategy_text"] = a.strategy_text ? json(*a.strategy_text) : json(nullptr);
  j["model_id"] = a.model_id ? json(*a.model_id) : json(nullptr);
  return j;
}

PlanningArtifact artifact_from_json(const json& j) {
  PlanningArtifact a;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "reference") {
      a.kind = ArtifactKind::kReference;
    } else if (kind == "external") {
      a.kind = ArtifactKind::kExternal;
    } else {
      throw ContractViolation("unknown artifact kind '" + kind + "'");
    }
    a.env_id = envs::env_id_from_string(j.at("env_id").get<std::string>());
    a.source_text = j.at("source_text").get<std::string>();
    a.prompt_hash = j.at("prompt_hash").get<std::string>();
    a.created_at = j.at("created_at").get<std::string>();
    a.launch = j.at("launch").get<std::vector<std::string>>();
    if (!j.at("strategy_text").is_null()) a.strategy_text = j.at("strategy_text").get<std::string>();
    if (!j.at("model_id").is_null()) a.model_id = j.at("model_id").get<std::string>();
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed planning artifact: ") + e.what());
  }
  return a;
}

std::vector<std::string> materialize_launch(const PlanningArtifact& artifact, const std::filesystem::path& dir) {
  std::vector<std::string> argv = artifact.launch;
  bool needs_source = false;
  for (const auto& arg : argv) needs_source = needs_source || arg.find(kSourcePlaceholder) != std::string::npos;
  if (!needs_source) return argv;

  std::filesystem::create_directories(dir);
  const auto path = dir / "planner_source.txt";
  bool current = false;
  if (std::ifstream in{path, std::ios::binary}) {
    std::ostringstream existing;
    existing << in.rdbuf();
    current = existing.str() == artifact.source_text;
  }
  if (!current) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << artifact.source_text;
    if (!out) throw Error("cannot write planner source to " + path.string());
  }
  for (auto& arg : argv) {
    for (auto pos = arg.find(kSourcePlaceholder); pos != std::string::npos; pos = arg.find(kSourcePlaceholder)) {
      arg.replace(pos, kSourcePlaceholder.size(), path.string());
    }
  }
  return argv;
}

}  // namespace yolo::plan
