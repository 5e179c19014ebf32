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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aegm/common/tensor.hpp"
#include "aegm/nn/dense.hpp"

namespace aegm {

// Lower bound applied to classifier probabilities before any log.
inline constexpr double kProbabilityClip = 1e-7;

struct AegmConfig {
  int input_dim = 640;
  std::vector<int> encoder_layers{128, 128, 128, 128};
  int bottleneck_dim = 8;
  int num_sections = 3;  // one decoder and one classifier class per section
  bool use_batch_norm = true;
  // Without the classifier the model is a plain group autoencoder and the
  // training objective reduces to the weighted reconstruction loss; this is
  // the only configuration that admits a single section.
  bool use_classifier = true;

  void Validate() const;  // BadConfig
  std::string Canonical() const;
};

// All trainable state plus the input standardization statistics, which are
// fitted on the training rows and never updated by the optimizer.
struct AegmParams {
  nn::Mlp encoder;
  std::vector<nn::Mlp> decoders;  // mirror-symmetric to the encoder
  nn::DenseLayer classifier;      // bottleneck -> M logits, no BN, identity
  Vector input_mean;
  Vector input_scale;
};

struct GroupedBatch {
  Tensor2 rows;
  std::vector<int> section_ids;
  Tensor2 one_hot_targets;

  // Validates ids against [0, num_sections) and builds the targets.
  static GroupedBatch Make(Tensor2 rows, std::vector<int> section_ids, int num_sections);
};

struct LossBreakdown {
  double l_aux = 0.0;
  std::vector<double> l_rec_per_decoder;
  std::vector<double> weights;
  double l_rec = 0.0;
  double l_total = 0.0;
};

// w_j = L_j / sum_k L_k; all zeros when the sum is zero.
std::vector<double> AdaptiveWeights(std::span<const double> per_decoder);
double WeightedReconstruction(std::span<const double> per_decoder, std::span<const double> weights);

struct MixingCoefficients {
  double rec = 0.5;  // multiplies L_rec: L_aux / (L_rec + L_aux)
  double aux = 0.5;  // multiplies L_aux: L_rec / (L_rec + L_aux)
};
MixingCoefficients ComputeMixing(double l_rec, double l_aux);
// L_aux/(L_rec+L_aux) * L_rec + L_rec/(L_rec+L_aux) * L_aux, zero when both are.
double TotalLoss(double l_rec, double l_aux);

// Replaces the adaptive weights and mixing coefficients by fixed values; the
// reported l_total is then the fixed-coefficient objective. Used to check
// detached gradients against finite differences.
struct FixedWeighting {
  std::vector<double> weights;
  MixingCoefficients mixing;
};

struct LossOptions {
  // Differentiate through w_j and the mixing coefficients instead of
  // treating them as constants.
  bool differentiable_weights = false;
  std::optional<FixedWeighting> fixed;
};

struct AegmGradients {
  nn::MlpGrads encoder;
  std::vector<nn::MlpGrads> decoders;
  nn::LayerGrads classifier;

  void SetZero();
  std::vector<std::span<double>> GaeBlocks();
  std::vector<std::span<double>> ClassifierBlocks();
};

class AegmModel {
 public:
  explicit AegmModel(AegmConfig config);

  const AegmConfig& config() const { return config_; }
  AegmParams& params() { return params_; }
  const AegmParams& params() const { return params_; }
  int num_decoders() const { return static_cast<int>(params_.decoders.size()); }

  void InitGlorot(std::uint64_t seed);
  // Fits per-dimension mean and standard deviation (floored) on rows.
  void FitInputNormalization(const Tensor2& rows);

  Tensor2 Normalize(const Tensor2& rows) const;

  // Eval-mode inference; inputs are raw feature rows.
  Tensor2 Encode(const Tensor2& rows) const;
  // Reconstruction (in normalized feature space) through decoder `section`.
  Tensor2 DecodeGroup(const Tensor2& embeddings, int section) const;
  Tensor2 ClassifierLogits(const Tensor2& embeddings) const;
  // Softmax floored at kProbabilityClip and renormalized.
  Tensor2 ClassifierProbs(const Tensor2& embeddings) const;

  // Forward pass over a batch; when grads is non-null it is zeroed and then
  // filled with dL_total/dtheta.
  LossBreakdown ComputeLosses(const GroupedBatch& batch, nn::Mode mode, AegmGradients* grads,
                              const LossOptions& options = {});

  AegmGradients ZeroGradients() const;
  // Optimizer groups: shared encoder + all decoders, and the classifier.
  std::vector<std::span<double>> GaeParameters();
  std::vector<std::span<double>> ClassifierParameters();

 private:
  AegmConfig config_;
  AegmParams params_;
};

}  // namespace aegm
