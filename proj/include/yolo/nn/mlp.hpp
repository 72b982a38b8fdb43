#ifndef YOLO_NN_MLP_HPP_
#define YOLO_NN_MLP_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace yolo::nn {

// Row-major so that a batch is one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation : std::uint32_t { kRelu = 0, kTanh = 1 };

// kOrthogonal: each weight matrix is the orthogonal factor of a seeded
// Gaussian matrix (QR, sign-corrected) times a gain; sqrt(2) on relu hidden
// layers, 5/3 on tanh hidden layers, `output_gain` on the last layer.
// Biases start at zero.
enum class InitScheme { kOrthogonal, kZeros };

// Activations kept by a batched forward pass for the backward pass.
struct ForwardCache {
  // layers[0] is the input; layers[k] is the output of layer k (post-activation
  // for hidden layers, linear for the last one).
  std::vector<Matrix> layers;
};

// Fully connected network with a linear output layer.
//
// Parameters are one flat vector. For each layer l, in order: the weight
// matrix W_l (out x in, row-major) followed by the bias b_l (out).
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, Activation activation);

  void initialize(InitScheme scheme, std::uint64_t seed, double output_gain = 1.0);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }
  std::size_t parameter_count() const { return params_.size(); }
  // Offset of layer l's weights inside the flat parameter vector.
  std::size_t layer_offset(int layer) const { return offsets_[layer]; }
  std::size_t layer_parameter_count(int layer) const;

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  void set_parameters(std::span<const double> params);

  Eigen::Map<const Matrix> weight(int layer) const;
  Eigen::Map<const Vector> bias(int layer) const;

  // Single sample. Throws ContractViolation on a size mismatch.
  std::vector<double> forward(std::span<const double> input) const;
  // Batch, one sample per row.
  Matrix forward(const Matrix& inputs) const;
  Matrix forward(const Matrix& inputs, ForwardCache& cache) const;

  // Reverse mode for the scalar sum over the batch of <output, output_grad>.
  // Adds the parameter gradient into `param_grad`; writes the input gradient
  // when `input_grad` is non-null.
  void backward(const ForwardCache& cache, const Matrix& output_grad, std::span<double> param_grad,
                Matrix* input_grad = nullptr) const;

  // Single-sample convenience: gradient of <forward(input), output_grad>.
  std::vector<double> backward(std::span<const double> input, std::span<const double> output_grad) const;

 private:
  void check_batch(const Matrix& inputs) const;

  std::vector<int> sizes_;
  Activation activation_ = Activation::kRelu;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Checkpoint byte layout, all little-endian:
//   char[4]  magic "YMLP"
//   u32      format version (1)
//   u32      activation (0 relu, 1 tanh)
//   u32      number of layer sizes L
//   u32[L]   layer sizes
//   u64      parameter count P
//   f64[P]   parameters in the flat order documented on Mlp
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Mlp& net, const std::filesystem::path& path);
Mlp load_checkpoint(const std::filesystem::path& path);
std::string encode_checkpoint(const Mlp& net);
Mlp decode_checkpoint(std::string_view bytes);

}  // namespace yolo::nn

#endif  // YOLO_NN_MLP_HPP_
