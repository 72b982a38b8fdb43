#include "yolo/harness/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "yolo/common/error.hpp"
#include "yolo/harness/run.hpp"

namespace yolo::harness {

namespace fs = std::filesystem;

double improvement_percent(double baseline, double yolo) {
  if (baseline == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (yolo - baseline) / std::abs(baseline) * 100.0;
}

std::vector<SeriesPoint> aggregate(const std::vector<std::vector<marl::MetricsRow>>& seeds) {
  std::vector<SeriesPoint> out;
  if (seeds.empty()) return out;
  std::map<long, std::vector<double>> by_step;
  for (const auto& rows : seeds) {
    for (const auto& r : rows) by_step[r.step].push_back(r.mean_eval_return);
  }
  for (const auto& [step, values] : by_step) {
    if (values.size() != seeds.size()) continue;
    SeriesPoint p;
    p.step = step;
    double sum = 0.0;
    for (double v : values) sum += v;
    p.mean = sum / static_cast<double>(values.size());
    p.min = *std::min_element(values.begin(), values.end());
    p.max = *std::max_element(values.begin(), values.end());
    out.push_back(p);
  }
  return out;
}

namespace {

struct Side {
  std::string env, algorithm;
  long total_steps = 0;
  std::vector<SeriesPoint> series;
};

Side load_side(const std::vector<fs::path>& dirs, const char* name) {
  if (dirs.empty()) throw ComparisonError(std::string(name) + ": no run directories");
  Side side;
  std::vector<std::vector<marl::MetricsRow>> seeds;
  for (const auto& dir : dirs) {
    RunConfig config;
    try {
      config = load_run_dir_config(dir);
    } catch (const ConfigError& e) {
      throw ComparisonError(dir.string() + ": " + e.what());
    }
    const std::string env(envs::to_string(config.env.id));
    const std::string algo(marl::to_string(config.algorithm));
    if (side.env.empty()) {
      side.env = env;
      side.algorithm = algo;
      side.total_steps = config.total_steps;
    } else if (env != side.env || algo != side.algorithm || config.total_steps != side.total_steps) {
      throw ComparisonError(dir.string() + ": runs differ in env, algorithm or step budget");
    }
    seeds.push_back(marl::read_metrics_csv(dir / "metrics.csv"));
  }
  side.series = aggregate(seeds);
  return side;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ComparisonReport compare_runs(const std::vector<fs::path>& baseline, const std::vector<fs::path>& yolo,
                              const std::vector<long>& checkpoints) {
  const Side b = load_side(baseline, "baseline");
  const Side y = load_side(yolo, "yolo");
  if (b.env != y.env || b.algorithm != y.algorithm) {
    throw ComparisonError("baseline and yolo runs use different environments or algorithms");
  }
  if (b.total_steps != y.total_steps) {
    throw ComparisonError("mismatched step budgets: baseline " + std::to_string(b.total_steps) + ", yolo " +
                          std::to_string(y.total_steps));
  }
  std::map<long, SeriesPoint> bs, ys;
  for (const auto& p : b.series) bs[p.step] = p;
  for (const auto& p : y.series) ys[p.step] = p;
  std::vector<long> steps = checkpoints;
  if (steps.empty()) {
    for (const auto& [step, p] : bs) {
      if (ys.count(step)) steps.push_back(step);
    }
  }
  ComparisonReport report{b.env, b.algorithm, b.total_steps, {}};
  for (long step : steps) {
    if (!bs.count(step) || !ys.count(step)) {
      throw ComparisonError("checkpoint " + std::to_string(step) + " missing from some runs");
    }
    report.rows.push_back({step, bs[step], ys[step], improvement_percent(bs[step].mean, ys[step].mean)});
  }
  return report;
}

std::string report_csv(const ComparisonReport& r) {
  std::ostringstream out;
  out << "step,baseline_mean,baseline_min,baseline_max,yolo_mean,yolo_min,yolo_max,improvement_pct\n";
  for (const auto& row : r.rows) {
    out << row.step << ',' << fmt(row.baseline.mean) << ',' << fmt(row.baseline.min) << ',' << fmt(row.baseline.max)
        << ',' << fmt(row.yolo.mean) << ',' << fmt(row.yolo.min) << ',' << fmt(row.yolo.max) << ','
        << fmt(row.improvement_pct) << '\n';
  }
  return out.str();
}

std::string report_table(const ComparisonReport& r) {
  std::ostringstream out;
  char line[160];
  out << r.env << " / " << r.algorithm << ", mean eval return [min, max] over seeds\n";
  std::snprintf(line, sizeof line, "%10s  %-26s  %-26s  %12s\n", "step", "baseline", "yolo", "improvement");
  out << line;
  for (const auto& row : r.rows) {
    char b[40], y[40];
    std::snprintf(b, sizeof b, "%.3f [%.3f, %.3f]", row.baseline.mean, row.baseline.min, row.baseline.max);
    std::snprintf(y, sizeof y, "%.3f [%.3f, %.3f]", row.yolo.mean, row.yolo.min, row.yolo.max);
    const std::string imp = std::isnan(row.improvement_pct) ? "n/a" : fmt(row.improvement_pct) + "%";
    std::snprintf(line, sizeof line, "%10ld  %-26s  %-26s  %12s\n", row.step, b, y, imp.c_str());
    out << line;
  }
  return out.str();
}

std::string report_svg(const ComparisonReport& r) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 30, kBottom = 50;
  double lo = 0.0, hi = 0.0;
  long max_step = 1;
  for (const auto& row : r.rows) {
    lo = std::min({lo, row.baseline.min, row.yolo.min});
    hi = std::max({hi, row.baseline.max, row.yolo.max});
    max_step = std::max(max_step, row.step);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  auto x = [&](long step) { return kLeft + (kW - kLeft - kRight) * static_cast<double>(step) / max_step; };
  auto y = [&](double v) { return kTop + (kH - kTop - kBottom) * (hi - v) / (hi - lo); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << r.env << " "
      << r.algorithm << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\""
      << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\" font-size=\"12\">steps</text>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << y(hi) + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(hi)
      << "</text>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << y(lo) + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(lo)
      << "</text>\n";
  out << "<text x=\"" << kW - kRight << "\" y=\"" << kH - kBottom + 15
      << "\" text-anchor=\"end\" font-size=\"10\">" << max_step << "</text>\n";

  auto draw = [&](auto pick, const char* colour, const char* label, double legend_y) {
    if (r.rows.empty()) return;
    std::ostringstream band, line;
    for (const auto& row : r.rows) band << x(row.step) << ',' << y(pick(row).max) << ' ';
    for (auto it = r.rows.rbegin(); it != r.rows.rend(); ++it) band << x(it->step) << ',' << y(pick(*it).min) << ' ';
    for (const auto& row : r.rows) line << x(row.step) << ',' << y(pick(row).mean) << ' ';
    out << "<polygon points=\"" << band.str() << "\" fill=\"" << colour << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    out << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + 10 << "\" y=\"" << legend_y << "\" fill=\"" << colour << "\" font-size=\"12\">"
        << label << "</text>\n";
  };
  draw([](const ComparisonRow& row) { return row.baseline; }, "#1f77b4", "baseline", kTop + 12);
  draw([](const ComparisonRow& row) { return row.yolo; }, "#d62728", "yolo", kTop + 26);
  out << "</svg>\n";
  return out.str();
}

}  // namespace yolo::harness
