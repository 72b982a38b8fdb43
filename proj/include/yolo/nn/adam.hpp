#ifndef YOLO_NN_ADAM_HPP_
#define YOLO_NN_ADAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace yolo::nn {

struct OptimState {
  std::int64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  OptimState() = default;
  OptimState(std::size_t n_params, double lr) : m(n_params, 0.0), v(n_params, 0.0), learning_rate(lr) {}
};

// Bias-corrected Adam update in place. Throws OptimizerError on a
// non-finite gradient, leaving params and state untouched.
void adam_step(OptimState& state, std::span<double> params, std::span<const double> grads);

// Rescales grads so their L2 norm is at most max_norm; returns the norm
// before clipping.
double clip_grad_norm(std::span<double> grads, double max_norm);

}  // namespace yolo::nn

#endif  // YOLO_NN_ADAM_HPP_
