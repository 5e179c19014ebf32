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

#include "aegm/nn/dense.hpp"

#include <cmath>

#include "aegm/common/error.hpp"

namespace aegm::nn {
namespace {

std::span<double> Span(Tensor2& t) { return {t.data(), static_cast<std::size_t>(t.size())}; }
std::span<double> Span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> Span(const Tensor2& t) {
  return {t.data(), static_cast<std::size_t>(t.size())};
}
std::span<const double> Span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

BatchNorm::BatchNorm(int dim)
    : gamma(Vector::Ones(dim)),
      beta(Vector::Zero(dim)),
      running_mean(Vector::Zero(dim)),
      running_var(Vector::Ones(dim)) {}

void LayerGrads::SetZero() {
  weight.setZero();
  bias.setZero();
  gamma.setZero();
  beta.setZero();
}

std::vector<std::span<double>> LayerGrads::Blocks() {
  std::vector<std::span<double>> out{Span(weight), Span(bias)};
  if (gamma.size() > 0) {
    out.push_back(Span(gamma));
    out.push_back(Span(beta));
  }
  return out;
}

DenseLayer::DenseLayer(int in_dim, int out_dim, Activation act, bool use_batch_norm)
    : weight(Tensor2::Zero(out_dim, in_dim)), bias(Vector::Zero(out_dim)), activation(act) {
  if (use_batch_norm) batch_norm.emplace(out_dim);
}

void DenseLayer::InitGlorot(Rng& rng) {
  const double limit = std::sqrt(6.0 / (in_dim() + out_dim()));
  for (Eigen::Index i = 0; i < weight.size(); ++i)
    weight.data()[i] = (2.0 * Uniform01(rng) - 1.0) * limit;
  bias.setZero();
  if (batch_norm) batch_norm = BatchNorm(out_dim());
}

Tensor2 DenseLayer::Compute(const Tensor2& x, Mode mode, LayerCache* cache, Vector* batch_mean,
                            Vector* batch_var) const {
  if (x.cols() != weight.cols())
    throw Error(ErrorCode::kShapeMismatch, "dense input has " + std::to_string(x.cols()) +
                                               " columns, layer expects " +
                                               std::to_string(weight.cols()));
  Tensor2 z = x * weight.transpose();
  z.rowwise() += bias.transpose();

  Tensor2 normalized;
  Vector inv_std;
  if (batch_norm) {
    const BatchNorm& bn = *batch_norm;
    Vector mean, var;
    if (mode == Mode::kTrain) {
      mean = z.colwise().mean().transpose();
      var = (z.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    } else {
      mean = bn.running_mean;
      var = bn.running_var;
    }
    inv_std = (var.array() + bn.epsilon).rsqrt().matrix();
    normalized = (z.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array();
    z = (normalized.array().rowwise() * bn.gamma.transpose().array()).matrix();
    z.rowwise() += bn.beta.transpose();
    if (batch_mean) *batch_mean = std::move(mean);
    if (batch_var) *batch_var = std::move(var);
  }

  Tensor2 y = activation == Activation::kRelu ? Tensor2(z.cwiseMax(0.0)) : z;
  if (cache) {
    cache->valid = true;
    cache->mode = mode;
    cache->input = x;
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
    cache->pre_activation = std::move(z);
  }
  return y;
}

Tensor2 DenseLayer::Forward(const Tensor2& x, Mode mode, LayerCache* cache) {
  Vector mean, var;
  Tensor2 y = Compute(x, mode, cache, &mean, &var);
  if (batch_norm && mode == Mode::kTrain) {
    BatchNorm& bn = *batch_norm;
    const double n = static_cast<double>(x.rows());
    // Running variance tracks the unbiased estimate.
    const Vector unbiased = x.rows() > 1 ? Vector(var * (n / (n - 1.0))) : var;
    bn.running_mean = (1.0 - bn.momentum) * bn.running_mean + bn.momentum * mean;
    bn.running_var = (1.0 - bn.momentum) * bn.running_var + bn.momentum * unbiased;
  }
  return y;
}

Tensor2 DenseLayer::Infer(const Tensor2& x) const {
  return Compute(x, Mode::kEval, nullptr, nullptr, nullptr);
}

Tensor2 DenseLayer::Backward(const Tensor2& grad_out, const LayerCache& cache,
                             LayerGrads& grads) const {
  if (!cache.valid) throw Error(ErrorCode::kNoForwardCache, "backward without a recorded forward");
  if (grad_out.rows() != cache.pre_activation.rows() || grad_out.cols() != weight.rows())
    throw Error(ErrorCode::kShapeMismatch, "upstream gradient shape does not match layer output");

  Tensor2 g = grad_out;
  if (activation == Activation::kRelu)
    g = (cache.pre_activation.array() > 0.0).select(g, 0.0);

  Tensor2 dz;
  if (batch_norm) {
    const BatchNorm& bn = *batch_norm;
    grads.gamma += (g.array() * cache.normalized.array()).colwise().sum().matrix().transpose();
    grads.beta += g.colwise().sum().transpose();
    Tensor2 dxhat = g.array().rowwise() * bn.gamma.transpose().array();
    if (cache.mode == Mode::kTrain) {
      const double n = static_cast<double>(g.rows());
      const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
      const Eigen::RowVectorXd sum_dxhat_xhat =
          (dxhat.array() * cache.normalized.array()).colwise().sum().matrix();
      Tensor2 centered = (dxhat * n).rowwise() - sum_dxhat;
      centered -= (cache.normalized.array().rowwise() * sum_dxhat_xhat.array()).matrix();
      dz = (centered.array().rowwise() * (cache.inv_std.transpose().array() / n)).matrix();
    } else {
      dz = (dxhat.array().rowwise() * cache.inv_std.transpose().array()).matrix();
    }
  } else {
    dz = std::move(g);
  }

  grads.weight.noalias() += dz.transpose() * cache.input;
  grads.bias += dz.colwise().sum().transpose();
  return dz * weight;
}

LayerGrads DenseLayer::ZeroGrads() const {
  LayerGrads g;
  g.weight = Tensor2::Zero(weight.rows(), weight.cols());
  g.bias = Vector::Zero(bias.size());
  if (batch_norm) {
    g.gamma = Vector::Zero(batch_norm->gamma.size());
    g.beta = Vector::Zero(batch_norm->beta.size());
  }
  return g;
}

std::vector<std::span<double>> DenseLayer::Parameters() {
  std::vector<std::span<double>> out{Span(weight), Span(bias)};
  if (batch_norm) {
    out.push_back(Span(batch_norm->gamma));
    out.push_back(Span(batch_norm->beta));
  }
  return out;
}

std::vector<std::span<const double>> DenseLayer::Parameters() const {
  std::vector<std::span<const double>> out{Span(weight), Span(bias)};
  if (batch_norm) {
    out.push_back(Span(batch_norm->gamma));
    out.push_back(Span(batch_norm->beta));
  }
  return out;
}

void MlpGrads::SetZero() {
  for (auto& l : layers) l.SetZero();
}

std::vector<std::span<double>> MlpGrads::Blocks() {
  std::vector<std::span<double>> out;
  for (auto& l : layers)
    for (auto s : l.Blocks()) out.push_back(s);
  return out;
}

void Mlp::InitGlorot(Rng& rng) {
  for (auto& l : layers) l.InitGlorot(rng);
}

Tensor2 Mlp::Forward(const Tensor2& x, Mode mode, MlpCache* cache) {
  if (cache) cache->layers.resize(layers.size());
  Tensor2 h = x;
  for (std::size_t i = 0; i < layers.size(); ++i)
    h = layers[i].Forward(h, mode, cache ? &cache->layers[i] : nullptr);
  return h;
}

Tensor2 Mlp::Infer(const Tensor2& x) const {
  Tensor2 h = x;
  for (const auto& l : layers) h = l.Infer(h);
  return h;
}

Tensor2 Mlp::Backward(const Tensor2& grad_out, const MlpCache& cache, MlpGrads& grads) const {
  if (cache.layers.size() != layers.size())
    throw Error(ErrorCode::kNoForwardCache, "mlp backward without a recorded forward");
  Tensor2 g = grad_out;
  for (std::size_t i = layers.size(); i-- > 0;)
    g = layers[i].Backward(g, cache.layers[i], grads.layers[i]);
  return g;
}

MlpGrads Mlp::ZeroGrads() const {
  MlpGrads g;
  for (const auto& l : layers) g.layers.push_back(l.ZeroGrads());
  return g;
}

std::vector<std::span<double>> Mlp::Parameters() {
  std::vector<std::span<double>> out;
  for (auto& l : layers)
    for (auto s : l.Parameters()) out.push_back(s);
  return out;
}

std::vector<std::span<const double>> Mlp::Parameters() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers)
    for (auto s : l.Parameters()) out.push_back(s);
  return out;
}

}  // namespace aegm::nn
