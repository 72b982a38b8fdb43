#include "yolo/nn/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "yolo/common/error.hpp"

namespace yolo::nn {
namespace {

void activate(Matrix& m, Activation act) {
  if (act == Activation::kRelu) {
    m = m.cwiseMax(0.0);
  } else {
    m = m.array().tanh().matrix();
  }
}

// d(act)/d(pre) expressed through the post-activation value.
void scale_by_derivative(Matrix& grad, const Matrix& post, Activation act) {
  if (act == Activation::kRelu) {
    grad = (post.array() > 0.0).select(grad, 0.0);
  } else {
    grad.array() *= 1.0 - post.array().square();
  }
}

Matrix orthogonal(int rows, int cols, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  Eigen::MatrixXd g(big, small);
  for (int r = 0; r < big; ++r) {
    for (int c = 0; c < small; ++c) g(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (int c = 0; c < small; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  Matrix out = rows >= cols ? Matrix(q) : Matrix(q.transpose());
  return gain * out;
}

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) throw IntegrityError("checkpoint truncated");
  T value;
  std::memcpy(&value, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return value;
}

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw ContractViolation("an Mlp needs at least an input and an output size");
  for (int s : sizes_) {
    if (s < 1) throw ContractViolation("layer sizes must be positive");
  }
  std::size_t offset = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(offset, 0.0);
}

std::size_t Mlp::layer_parameter_count(int layer) const {
  return static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1] + sizes_[layer + 1];
}

void Mlp::initialize(InitScheme scheme, std::uint64_t seed, double output_gain) {
  std::fill(params_.begin(), params_.end(), 0.0);
  if (scheme == InitScheme::kZeros) return;
  std::mt19937_64 rng(seed);
  const double hidden_gain = activation_ == Activation::kRelu ? std::sqrt(2.0) : 5.0 / 3.0;
  for (int l = 0; l < layer_count(); ++l) {
    const double gain = l + 1 == layer_count() ? output_gain : hidden_gain;
    const Matrix w = orthogonal(sizes_[l + 1], sizes_[l], gain, rng);
    Eigen::Map<Matrix>(params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]) = w;
  }
}

void Mlp::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) throw ContractViolation("parameter vector has the wrong length");
  std::copy(params.begin(), params.end(), params_.begin());
}

Eigen::Map<const Matrix> Mlp::weight(int layer) const {
  return {params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Vector> Mlp::bias(int layer) const {
  return {params_.data() + offsets_[layer] + static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1],
          sizes_[layer + 1]};
}

void Mlp::check_batch(const Matrix& inputs) const {
  if (inputs.cols() != input_size()) {
    throw ContractViolation("input has " + std::to_string(inputs.cols()) + " features, network expects " +
                            std::to_string(input_size()));
  }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw ContractViolation("input has " + std::to_string(input.size()) + " values, network expects " +
                            std::to_string(input_size()));
  }
  Matrix x = Eigen::Map<const Matrix>(input.data(), 1, input_size());
  const Matrix y = forward(x);
  return {y.data(), y.data() + y.size()};
}

Matrix Mlp::forward(const Matrix& inputs) const {
  check_batch(inputs);
  Matrix x = inputs;
  for (int l = 0; l < layer_count(); ++l) {
    Matrix y = x * weight(l).transpose();
    y.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count()) activate(y, activation_);
    x = std::move(y);
  }
  return x;
}

Matrix Mlp::forward(const Matrix& inputs, ForwardCache& cache) const {
  check_batch(inputs);
  cache.layers.resize(layer_count() + 1);
  cache.layers[0] = inputs;
  for (int l = 0; l < layer_count(); ++l) {
    Matrix& y = cache.layers[l + 1];
    y.noalias() = cache.layers[l] * weight(l).transpose();
    y.rowwise() += bias(l).transpose();
    if (l + 1 < layer_count()) activate(y, activation_);
  }
  return cache.layers.back();
}

void Mlp::backward(const ForwardCache& cache, const Matrix& output_grad, std::span<double> param_grad,
                   Matrix* input_grad) const {
  if (param_grad.size() != params_.size()) throw ContractViolation("gradient buffer has the wrong length");
  if (static_cast<int>(cache.layers.size()) != layer_count() + 1) throw ContractViolation("stale forward cache");
  if (output_grad.rows() != cache.layers.back().rows() || output_grad.cols() != output_size()) {
    throw ContractViolation("output gradient shape does not match the forward pass");
  }
  Matrix delta = output_grad;
  for (int l = layer_count() - 1; l >= 0; --l) {
    Eigen::Map<Matrix> gw(param_grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
    Eigen::Map<Vector> gb(param_grad.data() + offsets_[l] + static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1],
                          sizes_[l + 1]);
    gw.noalias() += delta.transpose() * cache.layers[l];
    gb.noalias() += delta.colwise().sum().transpose();
    if (l == 0 && input_grad == nullptr) break;
    Matrix prev = delta * weight(l);
    if (l > 0) {
      scale_by_derivative(prev, cache.layers[l], activation_);
    } else {
      *input_grad = std::move(prev);
      break;
    }
    delta = std::move(prev);
  }
}

std::vector<double> Mlp::backward(std::span<const double> input, std::span<const double> output_grad) const {
  if (static_cast<int>(input.size()) != input_size() || static_cast<int>(output_grad.size()) != output_size()) {
    throw ContractViolation("backward: input or output gradient has the wrong length");
  }
  ForwardCache cache;
  forward(Eigen::Map<const Matrix>(input.data(), 1, input_size()), cache);
  std::vector<double> grad(params_.size(), 0.0);
  backward(cache, Eigen::Map<const Matrix>(output_grad.data(), 1, output_size()), grad);
  return grad;
}

std::string encode_checkpoint(const Mlp& net) {
  std::string out = "YMLP";
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.activation()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  put<std::uint64_t>(out, net.parameter_count());
  for (double p : net.parameters()) put<double>(out, p);
  return out;
}

Mlp decode_checkpoint(std::string_view in) {
  if (in.substr(0, 4) != "YMLP") throw IntegrityError("not an Mlp checkpoint (bad magic)");
  in.remove_prefix(4);
  const auto version = take<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw IntegrityError("unsupported checkpoint version " + std::to_string(version));
  const auto act = take<std::uint32_t>(in);
  if (act > 1) throw IntegrityError("unknown activation code in checkpoint");
  const auto n_sizes = take<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64) throw IntegrityError("implausible layer count in checkpoint");
  std::vector<int> sizes;
  for (std::uint32_t k = 0; k < n_sizes; ++k) sizes.push_back(static_cast<int>(take<std::uint32_t>(in)));
  Mlp net(sizes, static_cast<Activation>(act));
  const auto count = take<std::uint64_t>(in);
  if (count != net.parameter_count()) throw IntegrityError("checkpoint parameter count does not match its layer sizes");
  for (auto& p : net.parameters()) p = take<double>(in);
  if (!in.empty()) throw IntegrityError("trailing bytes after checkpoint");
  return net;
}

void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const std::string bytes = encode_checkpoint(net);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write checkpoint " + path.string());
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return decode_checkpoint(buf.str());
  } catch (const IntegrityError& e) {
    throw IntegrityError(path.string() + ": " + e.what());
  }
}

}  // namespace yolo::nn
