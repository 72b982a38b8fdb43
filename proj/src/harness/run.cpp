#include "yolo/harness/run.hpp"

#include <fstream>
#include <mutex>
#include <thread>

#include "yolo/common/error.hpp"
#include "yolo/llmgen/store.hpp"
#include "yolo/nn/mlp.hpp"

namespace yolo::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return j;
}

fs::path claim_run_dir(const fs::path& parent, const std::string& base) {
  fs::create_directories(parent);
  for (int k = 0;; ++k) {
    const fs::path dir = parent / (k == 0 ? base : base + "-" + std::to_string(k));
    if (fs::create_directory(dir)) return dir;
  }
}

std::optional<plan::PlanningArtifact> resolve_artifact(const RunConfig& config) {
  switch (config.planner.kind) {
    case PlannerKind::kNone:
      return std::nullopt;
    case PlannerKind::kReference:
      return plan::PlanningArtifact::reference(config.env.id);
    case PlannerKind::kArtifact: {
      llmgen::ArtifactStore store(config.artifact_dir);
      auto artifact = store.get(config.env.id, config.planner.hash);
      if (!artifact) {
        throw ConfigError("planner: no artifact " + config.planner.hash + " for " +
                          std::string(envs::to_string(config.env.id)) + " in " + config.artifact_dir.string());
      }
      return artifact;
    }
  }
  return std::nullopt;
}

SeedRun run_one(const RunConfig& config, const std::optional<plan::PlanningArtifact>& artifact, std::uint64_t seed,
                std::mutex& dir_mutex) {
  fs::path dir;
  {
    std::lock_guard lock(dir_mutex);
    dir = claim_run_dir(config.output_dir, std::string(envs::to_string(config.env.id)) + "-" +
                                               std::string(marl::to_string(config.algorithm)) + "-" +
                                               variant_name(config) + "-seed" + std::to_string(seed));
  }
  RunConfig snapshot = config;
  snapshot.seeds = {seed};
  write_text(dir / "config.json", to_json(snapshot).dump(2) + "\n");

  const auto spec = envs::make_spec(config.env);
  std::unique_ptr<plan::Planner> planner;
  if (artifact) {
    planner = plan::make_planner(*artifact, spec, dir / "planner", std::chrono::milliseconds(config.planner_timeout_ms));
  }
  marl::Trainer trainer(config.train_config(seed), std::move(planner));
  trainer.run();

  marl::write_metrics_csv(dir / "metrics.csv", trainer.metrics());
  trainer.save_checkpoints(dir / "checkpoints");
  json run = {{"metrics_schema_version", kMetricsSchemaVersion},
              {"seed", seed},
              {"steps", trainer.steps()},
              {"planner", artifact ? plan::to_json(*artifact) : json("none")},
              {"planner_description", trainer.planner_description()},
              {"fell_back_to_reference", trainer.fell_back()},
              {"completed", true}};
  write_text(dir / "run.json", run.dump(2) + "\n");
  return SeedRun{seed, dir, trainer.metrics(), trainer.fell_back()};
}

}  // namespace

std::string variant_name(const RunConfig& config) {
  return config.planner.kind != PlannerKind::kNone && config.shaping.enabled ? "yolo" : "baseline";
}

std::vector<SeedRun> train_runs(const RunConfig& config) {
  config.validate();
  const auto artifact = resolve_artifact(config);
  std::vector<SeedRun> results(config.seeds.size());
  std::vector<std::exception_ptr> errors(config.seeds.size());
  std::mutex dir_mutex;
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard lock(next_mutex);
        if (next >= config.seeds.size()) return;
        k = next++;
      }
      try {
        results[k] = run_one(config, artifact, config.seeds[k], dir_mutex);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min<int>(config.jobs, static_cast<int>(config.seeds.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

RunConfig load_run_dir_config(const fs::path& run_dir) {
  return run_config_from_json(read_json(run_dir / "config.json"));
}

std::unique_ptr<marl::Policy> load_policy(const fs::path& run_dir) {
  const RunConfig config = load_run_dir_config(run_dir);
  const bool mappo = config.algorithm == marl::Algorithm::kMappo;
  const bool sharing = mappo ? config.mappo.parameter_sharing : config.qmix.parameter_sharing;
  marl::ObservationEncoder encoder(config.env, sharing);
  const int n_nets = sharing ? 1 : encoder.n_agents();
  std::vector<nn::Mlp> nets;
  for (int a = 0; a < n_nets; ++a) {
    const fs::path path = run_dir / "checkpoints" / ((mappo ? "actor_" : "agent_") + std::to_string(a) + ".ymlp");
    if (!fs::exists(path)) throw ConfigError("missing checkpoint " + path.string());
    nets.push_back(nn::load_checkpoint(path));
    if (nets.back().input_size() != encoder.obs_features()) {
      throw ConfigError("checkpoint " + path.string() + " does not match the configured observation size");
    }
  }
  return std::make_unique<marl::NetworkPolicy>(encoder, std::move(nets));
}

}  // namespace yolo::harness
