#include "yolo/marl/qmix.hpp"

#include <algorithm>
#include <cmath>

#include "yolo/common/error.hpp"
#include "yolo/common/seed.hpp"

namespace yolo::marl {
namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Observation rows (b * n + i) for the agents served by net `a`.
struct AgentGroup {
  std::vector<std::size_t> rows;
  nn::Matrix obs;
};

std::vector<AgentGroup> group_observations(std::size_t n_nets, const ObservationEncoder& encoder,
                                           const nn::Matrix& states) {
  const int n = encoder.n_agents();
  const std::size_t batch = states.rows();
  std::vector<AgentGroup> groups(n_nets);
  for (std::size_t a = 0; a < n_nets; ++a) {
    auto& g = groups[a];
    for (std::size_t b = 0; b < batch; ++b) {
      for (int i = 0; i < n; ++i) {
        if (n_nets == 1 || static_cast<std::size_t>(i) == a) g.rows.push_back(b * n + i);
      }
    }
    g.obs.resize(g.rows.size(), encoder.obs_features());
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      const std::size_t b = g.rows[r] / n;
      const int i = static_cast<int>(g.rows[r] % n);
      encoder.obs_from_features(states.row(b).data(), i, g.obs.row(r).data());
    }
  }
  return groups;
}

std::vector<double> concat_parameters(const QmixNetworks& nets) {
  std::vector<double> out;
  for (const auto& a : nets.agents) out.insert(out.end(), a.parameters().begin(), a.parameters().end());
  const auto mix = nets.mixer.parameters();
  out.insert(out.end(), mix.begin(), mix.end());
  return out;
}

void scatter_parameters(QmixNetworks& nets, const std::vector<double>& flat) {
  std::size_t off = 0;
  for (auto& a : nets.agents) {
    std::copy(flat.begin() + off, flat.begin() + off + a.parameter_count(), a.parameters().begin());
    off += a.parameter_count();
  }
  nets.mixer.set_parameters(std::span<const double>(flat).subspan(off));
}

}  // namespace

MixingNetwork::MixingNetwork(int n_agents, int state_features, int embed_dim, std::uint64_t seed)
    : n_agents_(n_agents),
      embed_(embed_dim),
      w1_({state_features, n_agents * embed_dim}, nn::Activation::kRelu),
      b1_({state_features, embed_dim}, nn::Activation::kRelu),
      w2_({state_features, embed_dim}, nn::Activation::kRelu),
      v_({state_features, embed_dim, 1}, nn::Activation::kRelu) {
  w1_.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, 0), 1.0);
  b1_.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, 1), 1.0);
  w2_.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, 2), 1.0);
  v_.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, 3), 1.0);
}

nn::Vector MixingNetwork::forward(const nn::Matrix& agent_qs, const nn::Matrix& states) const {
  MixCache cache;
  return forward(agent_qs, states, cache);
}

nn::Vector MixingNetwork::forward(const nn::Matrix& agent_qs, const nn::Matrix& states, MixCache& cache) const {
  if (agent_qs.cols() != n_agents_ || agent_qs.rows() != states.rows()) {
    throw ContractViolation("mixer: agent Q matrix must be batch x n_agents matching the state batch");
  }
  const auto batch = agent_qs.rows();
  cache.agent_qs = agent_qs;
  cache.w1_raw = w1_.forward(states, cache.w1);
  const nn::Matrix b1 = b1_.forward(states, cache.b1);
  cache.w2_raw = w2_.forward(states, cache.w2);
  const nn::Matrix v = v_.forward(states, cache.v);
  cache.hidden_pre = b1;
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int i = 0; i < n_agents_; ++i) {
      for (int e = 0; e < embed_; ++e) {
        cache.hidden_pre(b, e) += agent_qs(b, i) * std::abs(cache.w1_raw(b, i * embed_ + e));
      }
    }
  }
  cache.hidden = cache.hidden_pre.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
  nn::Vector q_tot(batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    double sum = v(b, 0);
    for (int e = 0; e < embed_; ++e) sum += cache.hidden(b, e) * std::abs(cache.w2_raw(b, e));
    q_tot[b] = sum;
  }
  return q_tot;
}

void MixingNetwork::backward(const MixCache& cache, const nn::Vector& dqtot, std::span<double> param_grad,
                             nn::Matrix* agent_q_grad) const {
  if (param_grad.size() != parameter_count()) throw ContractViolation("mixer backward: gradient size mismatch");
  const auto batch = cache.agent_qs.rows();
  nn::Matrix d_w1(batch, n_agents_ * embed_), d_b1(batch, embed_), d_w2(batch, embed_), d_v(batch, 1);
  if (agent_q_grad) agent_q_grad->setZero(batch, n_agents_);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double g = dqtot[b];
    d_v(b, 0) = g;
    for (int e = 0; e < embed_; ++e) {
      const double w2 = cache.w2_raw(b, e);
      d_w2(b, e) = g * cache.hidden(b, e) * sign(w2);
      const double pre = cache.hidden_pre(b, e);
      const double d_pre = g * std::abs(w2) * (pre > 0.0 ? 1.0 : std::exp(pre));
      d_b1(b, e) = d_pre;
      for (int i = 0; i < n_agents_; ++i) {
        const double w1 = cache.w1_raw(b, i * embed_ + e);
        d_w1(b, i * embed_ + e) = cache.agent_qs(b, i) * d_pre * sign(w1);
        if (agent_q_grad) (*agent_q_grad)(b, i) += std::abs(w1) * d_pre;
      }
    }
  }
  std::size_t off = 0;
  w1_.backward(cache.w1, d_w1, param_grad.subspan(off, w1_.parameter_count()));
  off += w1_.parameter_count();
  b1_.backward(cache.b1, d_b1, param_grad.subspan(off, b1_.parameter_count()));
  off += b1_.parameter_count();
  w2_.backward(cache.w2, d_w2, param_grad.subspan(off, w2_.parameter_count()));
  off += w2_.parameter_count();
  v_.backward(cache.v, d_v, param_grad.subspan(off, v_.parameter_count()));
}

std::size_t MixingNetwork::parameter_count() const {
  return w1_.parameter_count() + b1_.parameter_count() + w2_.parameter_count() + v_.parameter_count();
}

std::vector<double> MixingNetwork::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const nn::Mlp* net : {&w1_, &b1_, &w2_, &v_}) {
    out.insert(out.end(), net->parameters().begin(), net->parameters().end());
  }
  return out;
}

void MixingNetwork::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) throw ContractViolation("mixer: parameter count mismatch");
  std::size_t off = 0;
  for (nn::Mlp* net : {&w1_, &b1_, &w2_, &v_}) {
    net->set_parameters(params.subspan(off, net->parameter_count()));
    off += net->parameter_count();
  }
}

QmixNetworks::QmixNetworks(const ObservationEncoder& encoder, int n_actions, const QmixConfig& config,
                           std::uint64_t seed) {
  const int n_nets = config.parameter_sharing ? 1 : encoder.n_agents();
  std::vector<int> sizes{encoder.obs_features()};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(n_actions);
  for (int a = 0; a < n_nets; ++a) {
    nn::Mlp net(sizes, config.activation);
    net.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, a), 1.0);
    agents.push_back(std::move(net));
  }
  mixer = MixingNetwork(encoder.n_agents(), encoder.state_features(), config.mixing_embed_dim, derive_seed(seed, 500));
  sync_targets();
  std::size_t total = mixer.parameter_count();
  for (const auto& a : agents) total += a.parameter_count();
  optim = nn::OptimState(total, config.lr);
}

void QmixNetworks::sync_targets() {
  target_agents = agents;
  target_mixer = mixer;
}

ReplayBuffer::ReplayBuffer(int capacity, int n_agents, int state_features)
    : n_agents_(n_agents),
      states_(capacity, state_features),
      next_states_(capacity, state_features),
      actions_(static_cast<std::size_t>(capacity) * n_agents),
      rewards_(capacity),
      terminated_(capacity) {
  if (capacity < 1) throw ContractViolation("replay buffer: capacity must be >= 1");
}

void ReplayBuffer::add(std::span<const double> state, std::span<const int> actions, double reward, bool terminated,
                       std::span<const double> next_state) {
  if (state.size() != static_cast<std::size_t>(states_.cols()) || next_state.size() != state.size() ||
      actions.size() != static_cast<std::size_t>(n_agents_)) {
    throw ContractViolation("replay buffer: transition shape mismatch");
  }
  for (std::size_t k = 0; k < state.size(); ++k) {
    states_(next_, k) = state[k];
    next_states_(next_, k) = next_state[k];
  }
  std::copy(actions.begin(), actions.end(), actions_.begin() + next_ * n_agents_);
  rewards_[next_] = reward;
  terminated_[next_] = terminated ? 1 : 0;
  next_ = (next_ + 1) % capacity();
  size_ = std::min(size_ + 1, capacity());
}

QmixBatch ReplayBuffer::sample(int batch_size, std::mt19937_64& rng) const {
  if (size_ == 0) throw ContractViolation("replay buffer: sampling from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  QmixBatch out;
  out.states.resize(batch_size, states_.cols());
  out.next_states.resize(batch_size, states_.cols());
  out.actions.resize(static_cast<std::size_t>(batch_size) * n_agents_);
  out.rewards.resize(batch_size);
  out.terminated.resize(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const std::size_t k = pick(rng);
    out.states.row(b) = states_.row(k);
    out.next_states.row(b) = next_states_.row(k);
    std::copy_n(actions_.begin() + k * n_agents_, n_agents_, out.actions.begin() + b * n_agents_);
    out.rewards[b] = rewards_[k];
    out.terminated[b] = terminated_[k];
  }
  return out;
}

nn::Matrix agent_q_values(const std::vector<nn::Mlp>& agents, const ObservationEncoder& encoder,
                          const nn::Matrix& states) {
  const auto groups = group_observations(agents.size(), encoder, states);
  nn::Matrix q(states.rows() * encoder.n_agents(), agents.front().output_size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const nn::Matrix out = agents[a].forward(groups[a].obs);
    for (std::size_t r = 0; r < groups[a].rows.size(); ++r) q.row(groups[a].rows[r]) = out.row(r);
  }
  return q;
}

nn::Vector qmix_targets(const QmixBatch& batch, const QmixConfig& config, const QmixNetworks& nets,
                        const ObservationEncoder& encoder) {
  const int n = encoder.n_agents();
  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  const nn::Matrix target_q = agent_q_values(nets.target_agents, encoder, batch.next_states);
  const nn::Matrix select_q = config.double_q ? agent_q_values(nets.agents, encoder, batch.next_states) : target_q;
  nn::Matrix next(batch_size, n);
  for (Eigen::Index b = 0; b < batch_size; ++b) {
    for (int i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      select_q.row(b * n + i).maxCoeff(&best);
      next(b, i) = target_q(b * n + i, best);
    }
  }
  const nn::Vector next_tot = nets.target_mixer.forward(next, batch.next_states);
  nn::Vector y(batch_size);
  for (Eigen::Index b = 0; b < batch_size; ++b) {
    y[b] = batch.rewards[b] + (batch.terminated[b] ? 0.0 : config.gamma * next_tot[b]);
  }
  return y;
}

QmixLosses qmix_update(const QmixBatch& batch, const QmixConfig& config, QmixNetworks& nets,
                       const ObservationEncoder& encoder) {
  const int n = encoder.n_agents();
  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  if (batch_size == 0 || batch.actions.size() != batch.size() * n) {
    throw ContractViolation("qmix_update: inconsistent batch");
  }
  const nn::Vector y = qmix_targets(batch, config, nets, encoder);

  auto groups = group_observations(nets.agents.size(), encoder, batch.states);
  std::vector<nn::ForwardCache> caches(nets.agents.size());
  std::vector<nn::Matrix> outs(nets.agents.size());
  nn::Matrix chosen(batch_size, n);
  for (std::size_t a = 0; a < nets.agents.size(); ++a) {
    outs[a] = nets.agents[a].forward(groups[a].obs, caches[a]);
    for (std::size_t r = 0; r < groups[a].rows.size(); ++r) {
      const std::size_t row = groups[a].rows[r];
      chosen(row / n, row % n) = outs[a](r, batch.actions[row]);
    }
  }
  MixCache mix_cache;
  const nn::Vector q_tot = nets.mixer.forward(chosen, batch.states, mix_cache);
  const nn::Vector diff = q_tot - y;
  QmixLosses losses;
  losses.td_loss = diff.squaredNorm() / batch_size;
  losses.mean_q_tot = q_tot.mean();
  if (!std::isfinite(losses.td_loss)) throw TrainingAborted("qmix: non-finite TD loss");

  const nn::Vector d_tot = diff * (2.0 / batch_size);
  std::vector<double> grad(nets.optim.m.size(), 0.0);
  std::size_t off = 0;
  for (const auto& a : nets.agents) off += a.parameter_count();
  nn::Matrix dq;
  nets.mixer.backward(mix_cache, d_tot, std::span<double>(grad).subspan(off), &dq);
  off = 0;
  for (std::size_t a = 0; a < nets.agents.size(); ++a) {
    nn::Matrix g = nn::Matrix::Zero(outs[a].rows(), outs[a].cols());
    for (std::size_t r = 0; r < groups[a].rows.size(); ++r) {
      const std::size_t row = groups[a].rows[r];
      g(r, batch.actions[row]) = dq(row / n, row % n);
    }
    nets.agents[a].backward(caches[a], g, std::span<double>(grad).subspan(off, nets.agents[a].parameter_count()));
    off += nets.agents[a].parameter_count();
  }
  nn::clip_grad_norm(grad, config.max_grad_norm);
  auto params = concat_parameters(nets);
  try {
    nn::adam_step(nets.optim, params, grad);
  } catch (const OptimizerError& e) {
    throw TrainingAborted(std::string("qmix update: ") + e.what());
  }
  scatter_parameters(nets, params);
  ++nets.updates;
  if (nets.updates % config.target_update_interval == 0) nets.sync_targets();
  return losses;
}

}  // namespace yolo::marl
