#ifndef YOLO_MARL_GAE_HPP_
#define YOLO_MARL_GAE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace yolo::marl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Generalised advantage estimation over one environment's time-ordered steps.
//   delta_t = rewards[t] + gamma * next_values[t] - values[t]
//   A_t     = delta_t + gamma * lambda * A_{t+1}, unless episode_end[t]
// next_values[t] must already be 0 for a true terminal step and V(s_{t+1})
// otherwise (including time-limit truncation). The recursion never crosses
// an episode_end boundary or the end of the arrays.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const double> next_values, std::span<const std::uint8_t> episode_end, double gamma,
                      double lambda);

}  // namespace yolo::marl

#endif  // YOLO_MARL_GAE_HPP_
