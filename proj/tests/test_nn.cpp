#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "yolo/common/error.hpp"
#include "yolo/nn/adam.hpp"
#include "yolo/nn/gradcheck.hpp"
#include "yolo/nn/mlp.hpp"

using namespace yolo;
using namespace yolo::nn;

TEST(Mlp, ParameterCount) {
  Mlp net({5, 7, 3}, Activation::kTanh);
  EXPECT_EQ(net.parameter_count(), 5u * 7 + 7 + 7 * 3 + 3);
  EXPECT_EQ(net.layer_offset(1), 5u * 7 + 7);
}

TEST(Mlp, ZeroNetGivesZeroOutput) {
  Mlp net({4, 6, 2}, Activation::kRelu);
  net.initialize(InitScheme::kZeros, 0);
  EXPECT_EQ(net.forward(std::vector<double>{1, -2, 3, 4}), (std::vector<double>{0, 0}));
}

TEST(Mlp, IdentityLayer) {
  Mlp net({3, 3}, Activation::kRelu);
  std::vector<double> p(net.parameter_count(), 0.0);
  for (int i = 0; i < 3; ++i) p[i * 3 + i] = 1.0;
  net.set_parameters(p);
  const std::vector<double> x{-1.5, 0.25, 9.0};
  EXPECT_EQ(net.forward(x), x);
}

TEST(Mlp, HandComputedForward) {
  // 2 -> 2 (tanh) -> 1
  Mlp net({2, 2, 1}, Activation::kTanh);
  net.set_parameters(std::vector<double>{0.5, -1.0, 2.0, 0.25, 0.1, -0.2, 1.5, -0.5, 0.3});
  const double h0 = std::tanh(0.5 * 1.0 - 1.0 * 2.0 + 0.1);
  const double h1 = std::tanh(2.0 * 1.0 + 0.25 * 2.0 - 0.2);
  EXPECT_DOUBLE_EQ(net.forward(std::vector<double>{1.0, 2.0})[0], 1.5 * h0 - 0.5 * h1 + 0.3);
}

TEST(Mlp, DeterministicAndBatchConsistent) {
  Mlp net({4, 8, 8, 3}, Activation::kRelu);
  net.initialize(InitScheme::kOrthogonal, 12);
  Mlp again({4, 8, 8, 3}, Activation::kRelu);
  again.initialize(InitScheme::kOrthogonal, 12);
  EXPECT_EQ(net.parameters(), again.parameters());
  Matrix batch(5, 4);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 4; ++c) batch(r, c) = n(rng);
  }
  const Matrix out = net.forward(batch);
  for (int r = 0; r < 5; ++r) {
    std::vector<double> row(batch.row(r).data(), batch.row(r).data() + 4);
    const auto single = net.forward(row);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(out(r, c), single[c], 1e-12);
  }
}

TEST(Mlp, SizeMismatchThrows) {
  Mlp net({3, 2}, Activation::kRelu);
  EXPECT_THROW(net.forward(std::vector<double>{1, 2}), ContractViolation);
  EXPECT_THROW(net.backward(std::vector<double>{1, 2, 3}, std::vector<double>{1}), ContractViolation);
  EXPECT_THROW(net.set_parameters(std::vector<double>{1}), ContractViolation);
}

TEST(Mlp, OrthogonalInitRowsAreOrthogonal) {
  Mlp net({6, 6, 2}, Activation::kTanh);
  net.initialize(InitScheme::kOrthogonal, 4);
  const Matrix w = net.weight(0);
  const Matrix gram = w * w.transpose();
  const double gain2 = (5.0 / 3.0) * (5.0 / 3.0);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(gram(i, j), i == j ? gain2 : 0.0, 1e-9);
  }
  EXPECT_EQ(net.bias(0).norm(), 0.0);
}

TEST(Backward, MatchesIndependentFiniteDifferences) {
  Mlp net({3, 5, 2}, Activation::kTanh);
  net.initialize(InitScheme::kOrthogonal, 9);
  const std::vector<double> x{0.3, -0.7, 1.1}, g{0.6, -1.4};
  const auto analytic = net.backward(x, g);
  auto objective = [&](const Mlp& m) {
    const auto y = m.forward(x);
    return y[0] * g[0] + y[1] * g[1];
  };
  for (std::size_t k = 0; k < net.parameter_count(); ++k) {
    Mlp plus = net, minus = net;
    plus.parameters()[k] += 1e-6;
    minus.parameters()[k] -= 1e-6;
    EXPECT_NEAR(analytic[k], (objective(plus) - objective(minus)) / 2e-6, 1e-7);
  }
}

TEST(Backward, InputGradient) {
  Mlp net({3, 4, 1}, Activation::kRelu);
  net.initialize(InitScheme::kOrthogonal, 1);
  Matrix x(1, 3);
  x << 0.2, 0.5, -0.4;
  ForwardCache cache;
  net.forward(x, cache);
  Matrix og(1, 1);
  og << 1.0;
  std::vector<double> pg(net.parameter_count(), 0.0);
  Matrix ig;
  net.backward(cache, og, pg, &ig);
  for (int c = 0; c < 3; ++c) {
    Matrix xp = x, xm = x;
    xp(0, c) += 1e-6;
    xm(0, c) -= 1e-6;
    EXPECT_NEAR(ig(0, c), (net.forward(xp)(0, 0) - net.forward(xm)(0, 0)) / 2e-6, 1e-7);
  }
}

TEST(GradCheck, SuitePasses) {
  const auto report = run_gradcheck_suite(100, 0);
  EXPECT_EQ(report.nets_checked, 100);
  EXPECT_LT(report.max_rel_error, 1e-4);
  EXPECT_TRUE(report.passed());
  EXPECT_FALSE(report.to_string().empty());
}

TEST(GradCheck, WrongSignIsCaught) {
  const auto report = run_gradcheck_suite(5, 0, [](std::vector<double>& g) {
    for (auto& v : g) v = -v;
  });
  EXPECT_FALSE(report.passed());
  EXPECT_GT(report.max_rel_error, 1.0);
}

TEST(GradCheck, RelativeError) {
  EXPECT_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_error(1.0, -1.0), 2.0, 1e-12);
  EXPECT_LT(relative_error(1e-11, 2e-11), 1e-4);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  OptimState s(3, 0.01);
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -5.0, 1e-3};
  adam_step(s, p, g);
  EXPECT_NEAR(p[0], 1.0 - 0.01, 1e-9);
  EXPECT_NEAR(p[1], -2.0 + 0.01, 1e-9);
  EXPECT_NEAR(p[2], 0.5 - 0.01, 1e-7);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, MatchesHandRolledRecurrence) {
  OptimState s(1, 0.1);
  std::vector<double> p{0.0};
  double m = 0, v = 0, x = 0;
  const double gs[] = {1.0, -0.5, 2.0, 0.25};
  for (int t = 1; t <= 4; ++t) {
    const double g = gs[t - 1];
    adam_step(s, p, std::vector<double>{g});
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    x -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    EXPECT_NEAR(p[0], x, 1e-12);
  }
}

TEST(Adam, NonFiniteGradientLeavesStateUntouched) {
  OptimState s(2, 0.01);
  std::vector<double> p{1.0, 2.0};
  EXPECT_THROW(adam_step(s, p, std::vector<double>{NAN, 0.0}), OptimizerError);
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(s.m, (std::vector<double>{0.0, 0.0}));
}

TEST(Adam, ClipGradNorm) {
  std::vector<double> g{3.0, 4.0};
  EXPECT_DOUBLE_EQ(clip_grad_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g[0], 0.6, 1e-12);
  EXPECT_NEAR(g[1], 0.8, 1e-12);
  std::vector<double> small{0.1};
  clip_grad_norm(small, 1.0);
  EXPECT_EQ(small[0], 0.1);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Mlp net({4, 9, 3}, Activation::kTanh);
  net.initialize(InitScheme::kOrthogonal, 33);
  const auto path = std::filesystem::temp_directory_path() / "yolo_test_nn.ymlp";
  save_checkpoint(net, path);
  const Mlp back = load_checkpoint(path);
  EXPECT_EQ(back.layer_sizes(), net.layer_sizes());
  EXPECT_EQ(back.activation(), net.activation());
  EXPECT_EQ(back.parameters(), net.parameters());
  const auto bytes = encode_checkpoint(net);
  EXPECT_EQ(bytes.substr(0, 4), "YMLP");
  EXPECT_EQ(bytes.size(), 4 + 4 + 4 + 4 + 3 * 4 + 8 + net.parameter_count() * 8);
}

TEST(Checkpoint, CorruptBytesRejected) {
  Mlp net({2, 2}, Activation::kRelu);
  auto bytes = encode_checkpoint(net);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), Error);
  bytes[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bytes), Error);
}
