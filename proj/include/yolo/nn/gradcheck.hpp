#ifndef YOLO_NN_GRADCHECK_HPP_
#define YOLO_NN_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "yolo/nn/mlp.hpp"

namespace yolo::nn {

inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kGradCheckTolerance = 1e-4;
// Denominator floor of the relative error; gradients below it are compared
// on an absolute scale.
inline constexpr double kGradCheckFloor = 1e-6;

struct LayerWorst {
  int layer = 0;
  std::size_t index = 0;  // into the flat parameter vector
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<LayerWorst> layers;
  int nets_checked = 0;

  bool passed(double tolerance = kGradCheckTolerance) const { return max_rel_error < tolerance; }
  std::string to_string() const;
};

// Applied to the analytic gradient before comparison; lets tests corrupt it.
using GradientHook = std::function<void(std::vector<double>&)>;

double relative_error(double analytic, double numeric);

// Compares Mlp::backward against central differences of <forward(x), g>.
GradCheckReport gradient_check(const Mlp& net, std::span<const double> input, std::span<const double> output_grad,
                               double h = kGradCheckStep, const GradientHook& hook = {});

// `n_nets` seeded random networks (alternating relu/tanh, 1-3 hidden layers).
GradCheckReport run_gradcheck_suite(int n_nets, std::uint64_t seed, const GradientHook& hook = {});

}  // namespace yolo::nn

#endif  // YOLO_NN_GRADCHECK_HPP_
