#ifndef YOLO_MARL_METRICS_HPP_
#define YOLO_MARL_METRICS_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace yolo::marl {

// Losses are means over the updates since the previous row (NaN if none);
// epsilon is 0 for MAPPO; alignment_rate is NaN without a planner.
struct MetricsRow {
  long step = 0;
  double mean_eval_return = 0.0;
  double min_return = 0.0;
  double max_return = 0.0;
  double actor_loss = 0.0;
  double critic_or_td_loss = 0.0;
  double epsilon = 0.0;
  double alignment_rate = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "step,mean_eval_return,min,max,actor_loss,critic_or_td_loss,epsilon,alignment_rate";

// Values written with 17 significant digits so a round trip is exact.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
// Throws ComparisonError on a malformed file.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

}  // namespace yolo::marl

#endif  // YOLO_MARL_METRICS_HPP_
