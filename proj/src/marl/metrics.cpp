#include "yolo/marl/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "yolo/common/error.hpp"

namespace yolo::marl {
namespace {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(const std::string& field, const std::filesystem::path& path, int line) {
  if (field == "nan") return std::nan("");
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ComparisonError(path.string() + ":" + std::to_string(line) + ": bad number '" + field + "'");
  }
  return value;
}

}  // namespace

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << kMetricsHeader << "\n";
  for (const auto& r : rows) {
    out << r.step << "," << number(r.mean_eval_return) << "," << number(r.min_return) << ","
        << number(r.max_return) << "," << number(r.actor_loss) << "," << number(r.critic_or_td_loss) << ","
        << number(r.epsilon) << "," << number(r.alignment_rate) << "\n";
  }
  return out.str();
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << metrics_csv(rows);
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ComparisonError("cannot read metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ComparisonError(path.string() + ": unexpected metrics header");
  }
  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 8) {
      throw ComparisonError(path.string() + ":" + std::to_string(line_no) + ": expected 8 columns");
    }
    MetricsRow r;
    r.step = static_cast<long>(parse_number(fields[0], path, line_no));
    r.mean_eval_return = parse_number(fields[1], path, line_no);
    r.min_return = parse_number(fields[2], path, line_no);
    r.max_return = parse_number(fields[3], path, line_no);
    r.actor_loss = parse_number(fields[4], path, line_no);
    r.critic_or_td_loss = parse_number(fields[5], path, line_no);
    r.epsilon = parse_number(fields[6], path, line_no);
    r.alignment_rate = parse_number(fields[7], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace yolo::marl
