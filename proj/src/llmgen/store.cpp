#include "yolo/llmgen/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "yolo/common/error.hpp"
#include "yolo/llmgen/prompt.hpp"

namespace yolo::llmgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool valid_hash(const std::string& hash) {
  return !hash.empty() && std::all_of(hash.begin(), hash.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_atomic(const fs::path& path, const std::string& data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << data;
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

class WriteLock {
 public:
  explicit WriteLock(const fs::path& dir) {
    fs::create_directories(dir);
    fd_ = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~WriteLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

 private:
  int fd_ = -1;
};

plan::PlanningArtifact load(const fs::path& path) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("sha256") || !j.contains("artifact")) {
    throw IntegrityError("corrupt artifact file " + path.string());
  }
  if (!j["sha256"].is_string() || sha256_hex(j["artifact"].dump()) != j["sha256"].get<std::string>()) {
    throw IntegrityError("checksum mismatch in " + path.string());
  }
  try {
    return plan::artifact_from_json(j["artifact"]);
  } catch (const ContractViolation& e) {
    throw IntegrityError(path.string() + ": " + e.what());
  }
}

}  // namespace

ArtifactStore::ArtifactStore(fs::path root) : root_(std::move(root)) {}

fs::path ArtifactStore::env_dir(envs::EnvId env) const { return root_ / std::string(envs::to_string(env)); }

std::string ArtifactStore::put(const plan::PlanningArtifact& artifact) {
  if (artifact.kind != plan::ArtifactKind::kExternal) {
    throw ContractViolation("only external artifacts are stored");
  }
  artifact.check();
  if (!valid_hash(artifact.prompt_hash)) throw ContractViolation("artifact prompt_hash is not a hex digest");
  const fs::path dir = env_dir(artifact.env_id);
  WriteLock lock(dir);
  const json body = plan::to_json(artifact);
  const json file = {{"sha256", sha256_hex(body.dump())}, {"artifact", body}};
  const fs::path side = dir / artifact.prompt_hash;
  fs::create_directories(side);
  write_atomic(side / "planner_source.txt", artifact.source_text);
  write_atomic(side / "strategy.txt", artifact.strategy_text.value_or(""));
  write_atomic(dir / (artifact.prompt_hash + ".json"), file.dump(2) + "\n");
  return artifact.prompt_hash;
}

std::optional<plan::PlanningArtifact> ArtifactStore::get(envs::EnvId env, const std::string& hash) const {
  if (!valid_hash(hash)) return std::nullopt;
  const fs::path path = env_dir(env) / (hash + ".json");
  if (!fs::exists(path)) return std::nullopt;
  auto artifact = load(path);
  if (artifact.env_id != env || artifact.prompt_hash != hash) {
    throw IntegrityError("artifact in " + path.string() + " does not match its location");
  }
  return artifact;
}

std::vector<std::string> ArtifactStore::list(envs::EnvId env) const {
  std::vector<std::string> out;
  const fs::path dir = env_dir(env);
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    if (valid_hash(stem)) out.push_back(stem);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<plan::PlanningArtifact> ArtifactStore::latest(envs::EnvId env) const {
  std::optional<plan::PlanningArtifact> best;
  for (const auto& hash : list(env)) {
    auto a = get(env, hash);
    if (!best || std::tie(a->created_at, a->prompt_hash) > std::tie(best->created_at, best->prompt_hash)) best = a;
  }
  return best;
}

std::optional<plan::PlanningArtifact> ArtifactStore::find(const std::string& hash) const {
  for (auto env : {envs::EnvId::kLbf, envs::EnvId::kMpeSpread}) {
    if (auto a = get(env, hash)) return a;
  }
  return std::nullopt;
}

void ArtifactStore::put_strategy(envs::EnvId env, const std::string& hash, const std::string& text) {
  if (!valid_hash(hash)) throw ContractViolation("strategy key is not a hex digest");
  const fs::path dir = env_dir(env) / "strategies";
  WriteLock lock(env_dir(env));
  fs::create_directories(dir);
  write_atomic(dir / (hash + ".txt"), text);
}

std::optional<std::string> ArtifactStore::get_strategy(envs::EnvId env, const std::string& hash) const {
  if (!valid_hash(hash)) return std::nullopt;
  const fs::path path = env_dir(env) / "strategies" / (hash + ".txt");
  if (!fs::exists(path)) return std::nullopt;
  return read_file(path);
}

}  // namespace yolo::llmgen
