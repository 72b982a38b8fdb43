#ifndef YOLO_HARNESS_COMPARE_HPP_
#define YOLO_HARNESS_COMPARE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "yolo/marl/metrics.hpp"

namespace yolo::harness {

struct SeriesPoint {
  long step = 0;
  double mean = 0.0;  // across seeds
  double min = 0.0;
  double max = 0.0;
};

struct ComparisonRow {
  long step = 0;
  SeriesPoint baseline;
  SeriesPoint yolo;
  // (yolo - baseline) / |baseline| * 100; NaN when the baseline is 0.
  double improvement_pct = 0.0;
};

struct ComparisonReport {
  std::string env;
  std::string algorithm;
  long total_steps = 0;
  std::vector<ComparisonRow> rows;
};

double improvement_percent(double baseline, double yolo);

// Mean and range of mean_eval_return across seeds at every step all seeds
// share.
std::vector<SeriesPoint> aggregate(const std::vector<std::vector<marl::MetricsRow>>& seeds);

// `checkpoints` empty means every step present in both variants. Throws
// ComparisonError if the runs differ in env, algorithm or step budget, or a
// checkpoint is missing.
ComparisonReport compare_runs(const std::vector<std::filesystem::path>& baseline,
                              const std::vector<std::filesystem::path>& yolo, const std::vector<long>& checkpoints);

std::string report_csv(const ComparisonReport& report);
std::string report_table(const ComparisonReport& report);
// Mean lines with shaded min-max bands for both variants.
std::string report_svg(const ComparisonReport& report);

}  // namespace yolo::harness

#endif  // YOLO_HARNESS_COMPARE_HPP_
