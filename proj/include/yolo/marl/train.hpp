#ifndef YOLO_MARL_TRAIN_HPP_
#define YOLO_MARL_TRAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "yolo/envs/environment.hpp"
#include "yolo/marl/config.hpp"
#include "yolo/marl/mappo.hpp"
#include "yolo/marl/metrics.hpp"
#include "yolo/marl/observation.hpp"
#include "yolo/marl/policy.hpp"
#include "yolo/marl/qmix.hpp"
#include "yolo/plan/planner.hpp"
#include "yolo/shaping/shaping.hpp"

namespace yolo::marl {

enum class Algorithm { kMappo, kQmix };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view text);  // throws ConfigError

struct TrainConfig {
  envs::EnvConfig env;
  Algorithm algorithm = Algorithm::kMappo;
  MappoConfig mappo;
  QmixConfig qmix;
  shaping::ShapingConfig shaping;
  long total_steps = 200000;
  long eval_interval = 10000;
  int eval_episodes = 32;
  std::uint64_t seed = 0;
  // On a planner failure mid-run, continue with the reference planner
  // instead of aborting.
  bool fallback_to_reference = false;

  void validate() const;  // throws ConfigError
};

// The training loop: every environment step interprets the global state,
// queries the planner for per-agent assignments, acts with the current policy,
// shapes the reward and stores the transition for the algorithm's update.
// With no planner the reward is the environment reward and alignment_rate is
// NaN. The planner never influences the policy's random stream.
class Trainer {
 public:
  // `planner` may be null only when shaping is disabled.
  Trainer(TrainConfig config, std::unique_ptr<plan::Planner> planner);
  ~Trainer();

  // Runs to total_steps. Throws TrainingAborted on a planner failure (without
  // fallback) or a non-finite update; metrics and networks stay as they were.
  void run();

  std::function<void(const MetricsRow&)> on_eval;

  const TrainConfig& config() const { return config_; }
  const std::vector<MetricsRow>& metrics() const { return metrics_; }
  long steps() const { return steps_; }
  bool fell_back() const { return fell_back_; }
  std::string planner_description() const;
  const ObservationEncoder& encoder() const { return encoder_; }

  std::unique_ptr<Policy> policy() const;
  // actor_<k>.ymlp + critic.ymlp, or agent_<k>.ymlp + mixer_{w1,b1,w2,v}.ymlp.
  void save_checkpoints(const std::filesystem::path& dir) const;

  const MappoNetworks& mappo_networks() const { return mappo_; }
  const QmixNetworks& qmix_networks() const { return qmix_; }

 private:
  struct Slot;
  struct Shaped;

  Shaped env_step(Slot& slot, const envs::JointAction& actions);
  void run_mappo();
  void run_qmix();
  void maybe_evaluate(bool final);
  void record_losses(double actor, double critic);

  TrainConfig config_;
  std::unique_ptr<plan::Planner> planner_;
  envs::EnvSpec spec_;
  ObservationEncoder encoder_;
  MappoNetworks mappo_;
  QmixNetworks qmix_;
  std::mt19937_64 rng_;
  std::vector<MetricsRow> metrics_;
  long steps_ = 0;
  long next_eval_ = 0;
  bool fell_back_ = false;
  double loss_actor_sum_ = 0.0, loss_critic_sum_ = 0.0;
  long loss_count_ = 0;
  long aligned_count_ = 0, aligned_total_ = 0;
};

struct TrainResult {
  std::unique_ptr<Policy> policy;
  std::vector<MetricsRow> metrics;
};

TrainResult train(const TrainConfig& config, std::unique_ptr<plan::Planner> planner);
// `artifact` null means no planner.
TrainResult train(const TrainConfig& config, const plan::PlanningArtifact* artifact,
                  const std::filesystem::path& work_dir);

}  // namespace yolo::marl

#endif  // YOLO_MARL_TRAIN_HPP_
