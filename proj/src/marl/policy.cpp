#include "yolo/marl/policy.hpp"

#include <algorithm>

#include "yolo/common/error.hpp"
#include "yolo/common/seed.hpp"

namespace yolo::marl {

NetworkPolicy::NetworkPolicy(ObservationEncoder encoder, std::vector<nn::Mlp> nets)
    : encoder_(std::move(encoder)), nets_(std::move(nets)) {
  if (nets_.empty() || (nets_.size() != 1 && static_cast<int>(nets_.size()) != encoder_.n_agents())) {
    throw ContractViolation("NetworkPolicy: need one shared network or one per agent");
  }
}

std::vector<int> NetworkPolicy::act(const envs::GlobalState& state) const {
  const int n = encoder_.n_agents();
  std::vector<int> actions(n);
  std::vector<double> obs(encoder_.obs_features());
  for (int i = 0; i < n; ++i) {
    encoder_.encode_obs(state, i, obs.data());
    const auto out = nets_[nets_.size() == 1 ? 0 : i].forward(obs);
    actions[i] = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
  }
  return actions;
}

EvalResult evaluate(const Policy& policy, const envs::EnvConfig& config, int n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) throw ContractViolation("evaluate: n_episodes must be >= 1");
  auto env = envs::make_environment(config);
  EvalResult result;
  std::vector<double> rewards;
  for (int ep = 0; ep < n_episodes; ++ep) {
    envs::GlobalState state = env->reset(derive_seed(seed, ep));
    rewards.clear();
    for (;;) {
      const auto step = env->step(envs::JointAction{policy.act(state)});
      rewards.push_back(step.reward);
      state = step.next_state;
      if (step.done) break;
    }
    result.returns.push_back(envs::episode_return(rewards));
  }
  double sum = 0.0;
  for (double r : result.returns) sum += r;
  result.mean_return = sum / n_episodes;
  result.min_return = *std::min_element(result.returns.begin(), result.returns.end());
  result.max_return = *std::max_element(result.returns.begin(), result.returns.end());
  return result;
}

}  // namespace yolo::marl
