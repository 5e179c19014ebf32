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

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aegm/common/rng.hpp"
#include "aegm/common/tensor.hpp"

namespace aegm::nn {

enum class Mode { kTrain, kEval };
enum class Activation { kIdentity, kRelu };

struct BatchNorm {
  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;

  explicit BatchNorm(int dim = 0);
};

// Activations recorded by a forward pass for use in Backward.
struct LayerCache {
  bool valid = false;
  Mode mode = Mode::kEval;
  Tensor2 input;
  Tensor2 normalized;  // BN only
  Vector inv_std;      // BN only
  Tensor2 pre_activation;
};

// Gradient blocks in the same order as DenseLayer::Parameters().
struct LayerGrads {
  Tensor2 weight;
  Vector bias;
  Vector gamma;
  Vector beta;

  void SetZero();
  std::vector<std::span<double>> Blocks();
};

// y = act(BN(W x + b)); BN is optional.
struct DenseLayer {
  Tensor2 weight;  // out x in
  Vector bias;     // out
  Activation activation = Activation::kIdentity;
  std::optional<BatchNorm> batch_norm;

  DenseLayer() = default;
  DenseLayer(int in_dim, int out_dim, Activation act, bool use_batch_norm);

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }

  // Uniform Glorot weights, zero bias; BN reset to identity.
  void InitGlorot(Rng& rng);

  // Train mode normalizes with batch statistics and updates the running
  // statistics; Eval mode leaves the layer untouched. cache may be null.
  Tensor2 Forward(const Tensor2& x, Mode mode, LayerCache* cache);
  // Eval-mode forward as a const operation.
  Tensor2 Infer(const Tensor2& x) const;

  // Accumulates parameter gradients into grads and returns dL/dx.
  Tensor2 Backward(const Tensor2& grad_out, const LayerCache& cache, LayerGrads& grads) const;

  LayerGrads ZeroGrads() const;
  // Trainable blocks: weight, bias, then gamma and beta when BN is present.
  std::vector<std::span<double>> Parameters();
  std::vector<std::span<const double>> Parameters() const;

 private:
  Tensor2 Compute(const Tensor2& x, Mode mode, LayerCache* cache, Vector* batch_mean,
                  Vector* batch_var) const;
};

struct MlpCache {
  std::vector<LayerCache> layers;
};

struct MlpGrads {
  std::vector<LayerGrads> layers;

  void SetZero();
  std::vector<std::span<double>> Blocks();
};

// A fixed stack of dense layers.
struct Mlp {
  std::vector<DenseLayer> layers;

  int in_dim() const { return layers.front().in_dim(); }
  int out_dim() const { return layers.back().out_dim(); }

  void InitGlorot(Rng& rng);
  Tensor2 Forward(const Tensor2& x, Mode mode, MlpCache* cache);
  Tensor2 Infer(const Tensor2& x) const;
  Tensor2 Backward(const Tensor2& grad_out, const MlpCache& cache, MlpGrads& grads) const;
  MlpGrads ZeroGrads() const;
  std::vector<std::span<double>> Parameters();
  std::vector<std::span<const double>> Parameters() const;
};

}  // namespace aegm::nn
