#include "yolo/marl/observation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "yolo/common/error.hpp"

namespace yolo::marl {

ObservationEncoder::ObservationEncoder(const envs::EnvConfig& config, bool agent_id)
    : n_agents_(config.n_agents()), agent_id_(agent_id), lbf_(config.id == envs::EnvId::kLbf) {
  const auto spec = envs::make_spec(config);
  agent_stride_ = lbf_ ? 3 : 4;
  target_stride_ = lbf_ ? 3 : 2;
  n_targets_ = spec.n_targets;
  scale_.assign(spec.state_size(), 1.0);
  if (lbf_) {
    const double coord = 1.0 / (config.lbf.grid_size - 1);
    const int level_sum = std::accumulate(config.lbf.agent_levels.begin(), config.lbf.agent_levels.end(), 0);
    const double level = 1.0 / level_sum;
    for (std::size_t k = 0; k < scale_.size(); ++k) scale_[k] = (k % 3 == 2) ? level : coord;
  }
}

void ObservationEncoder::encode_state(const envs::GlobalState& state, double* out) const {
  if (state.values.size() != scale_.size()) {
    throw ContractViolation("observation encoder: state has " + std::to_string(state.values.size()) +
                            " values, expected " + std::to_string(scale_.size()));
  }
  for (std::size_t k = 0; k < scale_.size(); ++k) out[k] = state.values[k] * scale_[k];
}

void ObservationEncoder::obs_from_features(const double* features, int agent, double* out) const {
  const double* self = features + agent_stride_ * agent;
  const double* targets = features + agent_stride_ * n_agents_;
  double* o = std::copy(self, self + agent_stride_, out);
  auto relative = [&](const double* entity, int stride) {
    o[0] = entity[0] - self[0];
    o[1] = entity[1] - self[1];
    o = std::copy(entity + 2, entity + stride, o + 2);
  };
  for (int i = 0; i < n_agents_; ++i) {
    if (i != agent) relative(features + agent_stride_ * i, agent_stride_);
  }
  auto collected = [&](int j) { return lbf_ && targets[target_stride_ * j + 2] <= 0.0; };
  for (int j = 0; j < n_targets_; ++j) {
    if (collected(j)) {
      o = std::fill_n(o, target_stride_, 0.0);
    } else {
      relative(targets + target_stride_ * j, target_stride_);
    }
  }
  auto distances = [&](const double* a) {
    for (int j = 0; j < n_targets_; ++j) {
      if (collected(j)) {
        *o++ = 0.0;
        continue;
      }
      const double dx = targets[target_stride_ * j] - a[0];
      const double dy = targets[target_stride_ * j + 1] - a[1];
      *o++ = lbf_ ? std::abs(dx) + std::abs(dy) : std::hypot(dx, dy);
    }
  };
  distances(self);
  for (int i = 0; i < n_agents_; ++i) {
    if (i != agent) distances(features + agent_stride_ * i);
  }
  if (agent_id_) {
    for (int i = 0; i < n_agents_; ++i) *o++ = (i == agent) ? 1.0 : 0.0;
  }
}

void ObservationEncoder::encode_obs(const envs::GlobalState& state, int agent, double* out) const {
  std::vector<double> features(state_features());
  encode_state(state, features.data());
  obs_from_features(features.data(), agent, out);
}

std::vector<double> ObservationEncoder::state_vector(const envs::GlobalState& state) const {
  std::vector<double> out(state_features());
  encode_state(state, out.data());
  return out;
}

std::vector<double> ObservationEncoder::obs_vector(const envs::GlobalState& state, int agent) const {
  std::vector<double> out(obs_features());
  encode_obs(state, agent, out.data());
  return out;
}

}  // namespace yolo::marl
