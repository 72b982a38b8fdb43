#include "yolo/marl/gae.hpp"

#include "yolo/common/error.hpp"

namespace yolo::marl {

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const double> next_values, std::span<const std::uint8_t> episode_end, double gamma,
                      double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || episode_end.size() != n) {
    throw ContractViolation("compute_gae: input lengths differ");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double carry = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    if (episode_end[k]) carry = 0.0;
    const double delta = rewards[k] + gamma * next_values[k] - values[k];
    carry = delta + gamma * lambda * carry;
    out.advantages[k] = carry;
    out.returns[k] = carry + values[k];
  }
  return out;
}

}  // namespace yolo::marl
