#include "yolo/marl/mappo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "yolo/common/error.hpp"
#include "yolo/common/seed.hpp"

namespace yolo::marl {
namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

void apply(nn::Mlp& net, nn::OptimState& optim, std::vector<double>& grad, double max_norm, const char* name) {
  nn::clip_grad_norm(grad, max_norm);
  try {
    nn::adam_step(optim, net.parameters(), grad);
  } catch (const OptimizerError& e) {
    throw TrainingAborted(std::string("mappo ") + name + " update: " + e.what());
  }
}

}  // namespace

MappoNetworks::MappoNetworks(const ObservationEncoder& encoder, int n_actions, const MappoConfig& config,
                             std::uint64_t seed) {
  const int n_actors = config.parameter_sharing ? 1 : encoder.n_agents();
  for (int a = 0; a < n_actors; ++a) {
    nn::Mlp actor(layer_sizes(encoder.obs_features(), config.hidden, n_actions), config.activation);
    actor.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, a), 0.01);
    actor_optim.emplace_back(actor.parameter_count(), config.actor_lr);
    actors.push_back(std::move(actor));
  }
  critic = nn::Mlp(layer_sizes(encoder.state_features(), config.hidden, 1), config.activation);
  critic.initialize(nn::InitScheme::kOrthogonal, derive_seed(seed, 1000), 1.0);
  critic_optim = nn::OptimState(critic.parameter_count(), config.critic_lr);
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - top);
  const double log_z = top + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - log_z;
  return out;
}

SurrogateTerm surrogate_term(std::span<const double> logits, int action, double old_log_prob, double advantage,
                             double clip_eps) {
  const auto logp = log_softmax(logits);
  SurrogateTerm term;
  term.ratio = std::exp(logp[action] - old_log_prob);
  const double unclipped = term.ratio * advantage;
  const double clipped = std::clamp(term.ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
  term.loss = -std::min(unclipped, clipped);
  term.logit_grad.assign(logits.size(), 0.0);
  if (unclipped <= clipped) {
    const double d_logp = -advantage * term.ratio;
    for (std::size_t k = 0; k < logits.size(); ++k) {
      term.logit_grad[k] = d_logp * ((static_cast<int>(k) == action ? 1.0 : 0.0) - std::exp(logp[k]));
    }
  }
  return term;
}

MappoLosses mappo_update(const MappoBatch& batch, const MappoConfig& config, MappoNetworks& nets,
                         std::mt19937_64& rng) {
  const std::size_t n_samples = batch.size();
  const int n_agents = batch.n_agents;
  if (n_samples == 0) throw ContractViolation("mappo_update: empty batch");
  if (batch.actions.size() != n_samples * n_agents || batch.old_log_probs.size() != n_samples * n_agents ||
      batch.advantages.size() != n_samples || batch.returns.size() != n_samples ||
      static_cast<std::size_t>(batch.observations.rows()) != n_samples * n_agents ||
      static_cast<std::size_t>(batch.states.rows()) != n_samples) {
    throw ContractViolation("mappo_update: inconsistent batch dimensions");
  }

  const double mean = std::accumulate(batch.advantages.begin(), batch.advantages.end(), 0.0) / n_samples;
  double var = 0.0;
  for (double a : batch.advantages) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / n_samples);
  std::vector<double> adv(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) adv[k] = (batch.advantages[k] - mean) / (stddev + 1e-8);

  const int n_actors = static_cast<int>(nets.actors.size());
  const int obs_dim = static_cast<int>(batch.observations.cols());
  const int state_dim = static_cast<int>(batch.states.cols());
  const std::size_t n_mb = std::min<std::size_t>(config.minibatches, n_samples);

  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), 0);

  MappoLosses totals;
  long n_updates = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t mb = 0; mb < n_mb; ++mb) {
      const std::size_t begin = mb * n_samples / n_mb;
      const std::size_t end = (mb + 1) * n_samples / n_mb;
      const std::size_t m = end - begin;
      const double row_scale = 1.0 / static_cast<double>(m * n_agents);

      double actor_loss = 0.0, entropy = 0.0, kl = 0.0;
      for (int a = 0; a < n_actors; ++a) {
        std::vector<std::size_t> rows;
        for (std::size_t k = begin; k < end; ++k) {
          for (int i = 0; i < n_agents; ++i) {
            if (n_actors == 1 || i == a) rows.push_back(order[k] * n_agents + i);
          }
        }
        nn::Matrix x(rows.size(), obs_dim);
        for (std::size_t r = 0; r < rows.size(); ++r) x.row(r) = batch.observations.row(rows[r]);
        nn::ForwardCache cache;
        const nn::Matrix logits = nets.actors[a].forward(x, cache);
        nn::Matrix g(logits.rows(), logits.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const std::size_t row = rows[r];
          const std::span<const double> z(logits.row(r).data(), logits.cols());
          const auto term =
              surrogate_term(z, batch.actions[row], batch.old_log_probs[row], adv[row / n_agents], config.clip_eps);
          const auto logp = log_softmax(z);
          double h = 0.0;
          for (double lp : logp) h -= std::exp(lp) * lp;
          actor_loss += term.loss * row_scale;
          entropy += h * row_scale;
          kl += (batch.old_log_probs[row] - logp[batch.actions[row]]) * row_scale;
          for (int c = 0; c < logits.cols(); ++c) {
            const double p = std::exp(logp[c]);
            g(r, c) = (term.logit_grad[c] + config.entropy_coef * p * (logp[c] + h)) * row_scale;
          }
        }
        std::vector<double> grad(nets.actors[a].parameter_count(), 0.0);
        nets.actors[a].backward(cache, g, grad);
        apply(nets.actors[a], nets.actor_optim[a], grad, config.max_grad_norm, "actor");
      }
      if (!std::isfinite(actor_loss)) throw TrainingAborted("mappo: non-finite actor loss");

      nn::Matrix s(m, state_dim);
      for (std::size_t k = begin; k < end; ++k) s.row(k - begin) = batch.states.row(order[k]);
      nn::ForwardCache cache;
      const nn::Matrix v = nets.critic.forward(s, cache);
      nn::Matrix g(m, 1);
      double critic_loss = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t idx = order[begin + k];
        const double ret = batch.returns[idx];
        const double old = batch.old_values[idx];
        const double diff = v(k, 0) - old;
        const double v_clip = old + std::clamp(diff, -config.clip_eps, config.clip_eps);
        const double e1 = (v(k, 0) - ret) * (v(k, 0) - ret);
        const double e2 = (v_clip - ret) * (v_clip - ret);
        critic_loss += 0.5 * std::max(e1, e2) / m;
        double d = 0.0;
        if (e1 >= e2) {
          d = v(k, 0) - ret;
        } else if (std::abs(diff) < config.clip_eps) {
          d = v_clip - ret;
        }
        g(k, 0) = config.value_coef * d / m;
      }
      if (!std::isfinite(critic_loss)) throw TrainingAborted("mappo: non-finite critic loss");
      std::vector<double> grad(nets.critic.parameter_count(), 0.0);
      nets.critic.backward(cache, g, grad);
      apply(nets.critic, nets.critic_optim, grad, config.max_grad_norm, "critic");

      totals.actor_loss += actor_loss;
      totals.critic_loss += critic_loss;
      totals.entropy += entropy;
      totals.approx_kl += kl;
      ++n_updates;
    }
  }
  totals.actor_loss /= n_updates;
  totals.critic_loss /= n_updates;
  totals.entropy /= n_updates;
  totals.approx_kl /= n_updates;
  return totals;
}

}  // namespace yolo::marl
