#ifndef YOLO_MARL_POLICY_HPP_
#define YOLO_MARL_POLICY_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "yolo/envs/environment.hpp"
#include "yolo/marl/observation.hpp"
#include "yolo/nn/mlp.hpp"

namespace yolo::marl {

// Greedy decentralised execution; holds its own copy of the parameters.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<int> act(const envs::GlobalState& state) const = 0;
};

// Argmax over per-agent network outputs (actor logits or Q-values).
class NetworkPolicy final : public Policy {
 public:
  NetworkPolicy(ObservationEncoder encoder, std::vector<nn::Mlp> nets);
  std::vector<int> act(const envs::GlobalState& state) const override;
  const std::vector<nn::Mlp>& nets() const { return nets_; }

 private:
  ObservationEncoder encoder_;
  std::vector<nn::Mlp> nets_;
};

class FunctionPolicy final : public Policy {
 public:
  explicit FunctionPolicy(std::function<std::vector<int>(const envs::GlobalState&)> fn) : fn_(std::move(fn)) {}
  std::vector<int> act(const envs::GlobalState& state) const override { return fn_(state); }

 private:
  std::function<std::vector<int>(const envs::GlobalState&)> fn_;
};

struct EvalResult {
  double mean_return = 0.0;
  double min_return = 0.0;
  double max_return = 0.0;
  std::vector<double> returns;
};

// Episode k resets with derive_seed(seed, k). Uses only the environment
// reward. Throws ContractViolation when n_episodes < 1.
EvalResult evaluate(const Policy& policy, const envs::EnvConfig& config, int n_episodes, std::uint64_t seed);

}  // namespace yolo::marl

#endif  // YOLO_MARL_POLICY_HPP_
