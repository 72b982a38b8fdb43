#include "yolo/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace yolo::nn {
namespace {

double probe(const Mlp& net, std::span<const double> input, std::span<const double> output_grad) {
  const auto out = net.forward(input);
  return std::inner_product(out.begin(), out.end(), output_grad.begin(), 0.0);
}

void merge(GradCheckReport& into, const GradCheckReport& from) {
  into.max_rel_error = std::max(into.max_rel_error, from.max_rel_error);
  into.nets_checked += from.nets_checked;
  if (into.layers.size() < from.layers.size()) into.layers.resize(from.layers.size());
  for (std::size_t l = 0; l < from.layers.size(); ++l) {
    if (from.layers[l].rel_error >= into.layers[l].rel_error) into.layers[l] = from.layers[l];
    into.layers[l].layer = static_cast<int>(l);
  }
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / scale;
}

std::string GradCheckReport::to_string() const {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific;
  out << "gradcheck over " << nets_checked << " nets: max relative error " << max_rel_error << "\n";
  for (const auto& w : layers) {
    out << "  layer " << w.layer << ": worst rel err " << w.rel_error << " at param " << w.index << " (analytic "
        << w.analytic << ", numeric " << w.numeric << ")\n";
  }
  return out.str();
}

GradCheckReport gradient_check(const Mlp& net, std::span<const double> input, std::span<const double> output_grad,
                               double h, const GradientHook& hook) {
  auto analytic = net.backward(input, output_grad);
  if (hook) hook(analytic);
  Mlp probe_net = net;
  auto& params = probe_net.parameters();
  GradCheckReport report;
  report.nets_checked = 1;
  report.layers.resize(net.layer_count());
  for (int l = 0; l < net.layer_count(); ++l) {
    auto& worst = report.layers[l];
    worst.layer = l;
    const std::size_t begin = net.layer_offset(l);
    const std::size_t end = begin + net.layer_parameter_count(l);
    for (std::size_t k = begin; k < end; ++k) {
      const double saved = params[k];
      params[k] = saved + h;
      const double up = probe(probe_net, input, output_grad);
      params[k] = saved - h;
      const double down = probe(probe_net, input, output_grad);
      params[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[k], numeric);
      if (err >= worst.rel_error) {
        worst = {l, k, analytic[k], numeric, err};
      }
      report.max_rel_error = std::max(report.max_rel_error, err);
    }
  }
  return report;
}

GradCheckReport run_gradcheck_suite(int n_nets, std::uint64_t seed, const GradientHook& hook) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> width(2, 16);
  std::uniform_int_distribution<int> depth(1, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  GradCheckReport total;
  for (int n = 0; n < n_nets; ++n) {
    std::vector<int> sizes{width(rng)};
    const int hidden = depth(rng);
    for (int k = 0; k < hidden; ++k) sizes.push_back(width(rng));
    sizes.push_back(width(rng));
    Mlp net(sizes, n % 2 == 0 ? Activation::kTanh : Activation::kRelu);
    net.initialize(InitScheme::kOrthogonal, rng(), 1.0);
    // Non-zero biases so every parameter group is exercised.
    for (int l = 0; l < net.layer_count(); ++l) {
      const std::size_t b0 = net.layer_offset(l) + static_cast<std::size_t>(sizes[l]) * sizes[l + 1];
      for (int k = 0; k < sizes[l + 1]; ++k) net.parameters()[b0 + k] = 0.1 * normal(rng);
    }
    std::vector<double> x(sizes.front());
    std::vector<double> g(sizes.back());
    for (auto& v : x) v = normal(rng);
    for (auto& v : g) v = normal(rng);
    merge(total, gradient_check(net, x, g, kGradCheckStep, hook));
  }
  return total;
}

}  // namespace yolo::nn
