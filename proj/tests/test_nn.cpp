/* Copyright 2026 The AEGM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <doctest.h>

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "aegm/common/rng.hpp"
#include "aegm/nn/adam.hpp"
#include "aegm/nn/dense.hpp"
#include "aegm/nn/loss.hpp"
#include "test_util.hpp"

using namespace aegm;
using namespace aegm::nn;

namespace {

Tensor2 RandomMatrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Tensor2 m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * Uniform01(rng) - 1.0);
  return m;
}

// Largest relative error between Backward and central differences of
// sum(probe .* Forward(x)) over every parameter and every input entry.
double MlpGradientError(Mlp net, const Tensor2& x, const Tensor2& probe, Mode mode) {
  auto objective = [&](Mlp& n, const Tensor2& in) {
    Mlp copy = n;  // Forward in Train mode moves running stats
    return (copy.Forward(in, mode, nullptr).array() * probe.array()).sum();
  };
  MlpCache cache;
  Mlp work = net;
  work.Forward(x, mode, &cache);
  MlpGrads grads = work.ZeroGrads();
  const Tensor2 dx = work.Backward(probe, cache, grads);

  const double h = 1e-6;
  double worst = 0;
  // 1e-5 floor: a pre-BN bias has an exactly zero gradient, and the central
  // difference of it is pure roundoff of order 1e-10.
  auto params = net.Parameters();
  auto blocks = grads.Blocks();
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double keep = params[b][i];
      params[b][i] = keep + h;
      const double up = objective(net, x);
      params[b][i] = keep - h;
      const double down = objective(net, x);
      params[b][i] = keep;
      worst = std::max(worst, aegm::testing::RelErr(blocks[b][i], (up - down) / (2 * h), 1e-5));
    }
  }
  Tensor2 xp = x;
  for (Eigen::Index i = 0; i < xp.size(); ++i) {
    const double keep = xp.data()[i];
    xp.data()[i] = keep + h;
    const double up = objective(net, xp);
    xp.data()[i] = keep - h;
    const double down = objective(net, xp);
    xp.data()[i] = keep;
    worst = std::max(worst, aegm::testing::RelErr(dx.data()[i], (up - down) / (2 * h), 1e-5));
  }
  return worst;
}

Mlp RandomNet(const std::vector<int>& widths, bool bn, Rng& rng) {
  Mlp net;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    net.layers.emplace_back(widths[i], widths[i + 1], last ? Activation::kIdentity : Activation::kRelu,
                            bn && !last);
  }
  net.InitGlorot(rng);
  // Non-trivial BN affine parameters and biases.
  for (auto& l : net.layers) {
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = 0.3 * (Uniform01(rng) - 0.5);
    if (l.batch_norm) {
      for (Eigen::Index i = 0; i < l.batch_norm->gamma.size(); ++i) {
        l.batch_norm->gamma[i] = 0.5 + Uniform01(rng);
        l.batch_norm->beta[i] = Uniform01(rng) - 0.5;
      }
    }
  }
  return net;
}

}  // namespace

TEST_CASE("dense: identity weights pass the input through") {
  DenseLayer l(3, 3, Activation::kIdentity, false);
  l.weight = Tensor2::Identity(3, 3);
  l.bias.setZero();
  Tensor2 x(2, 3);
  x << 1, -2, 3, 0.5, 0, -7;
  CHECK(l.Infer(x) == x);
}

TEST_CASE("dense: small arithmetic and relu") {
  DenseLayer l(2, 1, Activation::kIdentity, false);
  l.weight.resize(1, 2);
  l.weight << 1, 1;
  l.bias.resize(1);
  l.bias << 0.5;
  Tensor2 x(1, 2);
  x << 1, 2;
  CHECK(l.Infer(x)(0, 0) == 3.5);

  DenseLayer r(2, 2, Activation::kRelu, false);
  r.weight = Tensor2::Identity(2, 2);
  r.bias.setZero();
  Tensor2 y(1, 2);
  y << -1, 2;
  const Tensor2 out = r.Infer(y);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == 2.0);
}

TEST_CASE("dense: hand-derived gradient of a scalar regression") {
  DenseLayer l(1, 1, Activation::kIdentity, false);
  l.weight(0, 0) = 0.7;
  l.bias[0] = -0.2;
  Tensor2 x(1, 1), y(1, 1);
  x(0, 0) = 1.5;
  y(0, 0) = 2.0;
  LayerCache cache;
  const Tensor2 pred = l.Forward(x, Mode::kTrain, &cache);
  const LossResult loss = MseLoss(pred, y);
  LayerGrads g = l.ZeroGrads();
  l.Backward(loss.grad, cache, g);
  const double resid = 0.7 * 1.5 - 0.2 - 2.0;
  CHECK(g.weight(0, 0) == doctest::Approx(2 * resid * 1.5).epsilon(1e-15));
  CHECK(g.bias[0] == doctest::Approx(2 * resid).epsilon(1e-15));
}

TEST_CASE("dense: zero upstream gradient gives zero parameter gradients") {
  Rng rng(2);
  Mlp net = RandomNet({4, 6, 3}, true, rng);
  const Tensor2 x = RandomMatrix(5, 4, rng);
  MlpCache cache;
  net.Forward(x, Mode::kTrain, &cache);
  MlpGrads g = net.ZeroGrads();
  const Tensor2 dx = net.Backward(Tensor2::Zero(5, 3), cache, g);
  CHECK(dx.isZero(0.0));
  for (auto block : g.Blocks())
    for (double v : block) CHECK(v == 0.0);
}

TEST_CASE("dense: gradients match central differences") {
  Rng rng(123);
  for (int trial = 0; trial < 6; ++trial) {
    const bool bn = trial % 2 == 1;
    Mlp net = RandomNet({5, 7, 6, 4}, bn, rng);
    const Tensor2 x = RandomMatrix(9, 5, rng);
    const Tensor2 probe = RandomMatrix(9, 4, rng);
    CAPTURE(trial);
    CHECK(MlpGradientError(net, x, probe, Mode::kTrain) < 1e-4);
    if (!bn) CHECK(MlpGradientError(net, x, probe, Mode::kEval) < 1e-4);
  }
}

TEST_CASE("batch norm: eval mode is pure, train mode tracks statistics") {
  Rng rng(8);
  DenseLayer l(3, 4, Activation::kRelu, true);
  l.InitGlorot(rng);
  const Tensor2 x = RandomMatrix(16, 3, rng);
  const DenseLayer before = l;
  const Tensor2 a = l.Forward(x, Mode::kEval, nullptr);
  const Tensor2 b = l.Forward(x, Mode::kEval, nullptr);
  CHECK(a == b);
  CHECK(l.batch_norm->running_mean == before.batch_norm->running_mean);
  CHECK(l.batch_norm->running_var == before.batch_norm->running_var);

  l.Forward(x, Mode::kTrain, nullptr);
  const Tensor2 z = x * l.weight.transpose();
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double mu = z.col(j).mean();
    const double var = (z.col(j).array() - mu).square().sum() / 15.0;  // unbiased
    CHECK(l.batch_norm->running_mean[j] == doctest::Approx(0.1 * mu).epsilon(1e-12));
    CHECK(l.batch_norm->running_var[j] == doctest::Approx(0.9 + 0.1 * var).epsilon(1e-12));
  }
}

TEST_CASE("mse: examples and symmetry") {
  Tensor2 p(1, 2), t = Tensor2::Zero(1, 2);
  p << 1, 2;
  const LossResult r = MseLoss(p, t);
  CHECK(r.value == 5.0);
  CHECK(r.grad(0, 0) == 2.0);
  CHECK(r.grad(0, 1) == 4.0);
  CHECK(MseLoss(p, p).value == 0.0);

  Rng rng(3);
  const Tensor2 a = RandomMatrix(7, 5, rng), b = RandomMatrix(7, 5, rng);
  CHECK(MseLoss(a, b).value == MseLoss(b, a).value);
  CHECK(MseLoss(a, b).value > 0.0);
  CHECK(MseLoss(a, b, Reduction::kSum).value == doctest::Approx(7 * MseLoss(a, b).value).epsilon(1e-14));
  CHECK_THROWS_CODE(MseLoss(a, Tensor2::Zero(7, 4)), ErrorCode::kShapeMismatch);
}

TEST_CASE("softmax cross-entropy: examples") {
  Tensor2 uniform = Tensor2::Zero(1, 3);
  for (int c = 0; c < 3; ++c) {
    Tensor2 y = Tensor2::Zero(1, 3);
    y(0, c) = 1;
    CHECK(SoftmaxCrossEntropy(uniform, y).value == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  }
  Tensor2 sat(1, 3), y = Tensor2::Zero(1, 3);
  sat << 10, -10, -10;
  y(0, 0) = 1;
  const LossResult r = SoftmaxCrossEntropy(sat, y);
  CHECK(r.value < 1e-8);
  CHECK(r.value >= 0.0);

  Tensor2 huge(1, 3);
  huge << -1000, 1000, 0;
  CHECK(std::isfinite(SoftmaxCrossEntropy(huge, y).value));

  Tensor2 not_one_hot = Tensor2::Zero(1, 3);
  not_one_hot(0, 0) = 0.5;
  not_one_hot(0, 1) = 0.5;
  CHECK_THROWS_CODE(SoftmaxCrossEntropy(sat, not_one_hot), ErrorCode::kBadTarget);
}

TEST_CASE("softmax rows sum to one and cross-entropy gradients are exact") {
  Rng rng(6);
  const Tensor2 logits = RandomMatrix(20, 4, rng, 30.0);
  const Tensor2 s = Softmax(logits);
  for (Eigen::Index r = 0; r < s.rows(); ++r) CHECK(std::fabs(s.row(r).sum() - 1.0) < 1e-12);

  const Tensor2 z = RandomMatrix(6, 4, rng, 2.0);
  Tensor2 y = Tensor2::Zero(6, 4);
  for (int r = 0; r < 6; ++r) y(r, static_cast<Eigen::Index>(UniformIndex(rng, 4))) = 1;
  const LossResult ce = SoftmaxCrossEntropy(z, y);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Tensor2 up = z, down = z;
    up.data()[i] += h;
    down.data()[i] -= h;
    const double fd = (SoftmaxCrossEntropy(up, y).value - SoftmaxCrossEntropy(down, y).value) / (2 * h);
    CHECK(aegm::testing::RelErr(ce.grad.data()[i], fd, 1e-6) < 1e-6);
  }
}

TEST_CASE("adam: first step moves each parameter by about lr") {
  std::vector<double> p = {1.0}, g = {0.5};
  std::vector<std::span<double>> ps = {p}, gs = {g};
  AdamState st(0.001);
  AdamStep(st, ps, gs);
  // m_hat = g, v_hat = g^2 at t = 1.
  const double expected = 1.0 - 0.001 * 0.5 / (0.5 + 1e-8);
  CHECK(p[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(std::fabs((p[0] - 1.0) + 0.001) < 1e-6);
  CHECK(st.step == 1);
}

TEST_CASE("adam: zero gradients never move parameters") {
  std::vector<double> p = {1.0, -2.0, 3.0}, g = {0.0, 0.0, 0.0};
  const std::vector<double> orig = p;
  std::vector<std::span<double>> ps = {p}, gs = {g};
  AdamState st(0.01);
  for (int t = 1; t <= 20; ++t) {
    AdamStep(st, ps, gs);
    CHECK(p == orig);
    CHECK(st.step == t);
  }
}

TEST_CASE("adam: layout changes are rejected") {
  std::vector<double> p = {1.0}, g = {0.5}, p2 = {1, 2}, g2 = {1, 2};
  AdamState st;
  std::vector<std::span<double>> ps = {p}, gs = {g};
  AdamStep(st, ps, gs);
  std::vector<std::span<double>> ps2 = {p2}, gs2 = {g2};
  CHECK_THROWS_CODE(AdamStep(st, ps2, gs2), ErrorCode::kShapeMismatch);
  CHECK_THROWS_CODE(AdamStep(st, ps, gs2), ErrorCode::kShapeMismatch);
}

TEST_CASE("training loop is bit-reproducible") {
  auto run = [] {
    Rng rng(99);
    Mlp net = RandomNet({6, 8, 6}, true, rng);
    AdamState st(0.01);
    for (int step = 0; step < 100; ++step) {
      const Tensor2 x = RandomMatrix(8, 6, rng);
      MlpCache cache;
      const Tensor2 y = net.Forward(x, Mode::kTrain, &cache);
      const LossResult l = MseLoss(y, x);
      MlpGrads g = net.ZeroGrads();
      net.Backward(l.grad, cache, g);
      AdamStep(st, net.Parameters(), g.Blocks());
    }
    std::vector<double> flat;
    for (auto b : std::as_const(net).Parameters()) flat.insert(flat.end(), b.begin(), b.end());
    for (auto& l : net.layers)
      if (l.batch_norm)
        flat.insert(flat.end(), l.batch_norm->running_var.data(),
                    l.batch_norm->running_var.data() + l.batch_norm->running_var.size());
    return flat;
  };
  CHECK(run() == run());
}
