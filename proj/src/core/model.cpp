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

#include "aegm/core/model.hpp"

#include <algorithm>
#include <cmath>

#include "aegm/common/error.hpp"
#include "aegm/common/rng.hpp"
#include "aegm/nn/loss.hpp"

namespace aegm {
namespace {

using nn::Activation;
using nn::DenseLayer;
using nn::Mlp;

Mlp BuildEncoder(const AegmConfig& cfg) {
  Mlp mlp;
  int prev = cfg.input_dim;
  for (int width : cfg.encoder_layers) {
    mlp.layers.emplace_back(prev, width, Activation::kRelu, cfg.use_batch_norm);
    prev = width;
  }
  mlp.layers.emplace_back(prev, cfg.bottleneck_dim, Activation::kRelu, cfg.use_batch_norm);
  return mlp;
}

Mlp BuildDecoder(const AegmConfig& cfg) {
  Mlp mlp;
  int prev = cfg.bottleneck_dim;
  for (auto it = cfg.encoder_layers.rbegin(); it != cfg.encoder_layers.rend(); ++it) {
    mlp.layers.emplace_back(prev, *it, Activation::kRelu, cfg.use_batch_norm);
    prev = *it;
  }
  mlp.layers.emplace_back(prev, cfg.input_dim, Activation::kIdentity, false);
  return mlp;
}

Tensor2 GatherRows(const Tensor2& src, const std::vector<Eigen::Index>& idx) {
  Tensor2 out(static_cast<Eigen::Index>(idx.size()), src.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = src.row(idx[i]);
  return out;
}

}  // namespace

void AegmConfig::Validate() const {
  if (input_dim < 1) throw Error(ErrorCode::kBadConfig, "input_dim must be positive");
  if (bottleneck_dim < 1 || bottleneck_dim >= input_dim)
    throw Error(ErrorCode::kBadConfig, "bottleneck_dim must satisfy 1 <= bottleneck_dim < input_dim");
  for (int w : encoder_layers)
    if (w < 1) throw Error(ErrorCode::kBadConfig, "encoder layer widths must be positive");
  if (use_classifier && num_sections < 2)
    throw Error(ErrorCode::kBadConfig, "the auxiliary classifier needs at least 2 sections");
  if (num_sections < 1) throw Error(ErrorCode::kBadConfig, "num_sections must be >= 1");
}

std::string AegmConfig::Canonical() const {
  std::string s = "input_dim=" + std::to_string(input_dim) + ";encoder=";
  for (std::size_t i = 0; i < encoder_layers.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(encoder_layers[i]);
  }
  s += ";bottleneck=" + std::to_string(bottleneck_dim);
  s += ";sections=" + std::to_string(num_sections);
  s += ";bn=" + std::to_string(use_batch_norm ? 1 : 0);
  s += ";classifier=" + std::to_string(use_classifier ? 1 : 0);
  return s;
}

GroupedBatch GroupedBatch::Make(Tensor2 rows, std::vector<int> section_ids, int num_sections) {
  if (static_cast<Eigen::Index>(section_ids.size()) != rows.rows())
    throw Error(ErrorCode::kShapeMismatch, "one section id per row required");
  GroupedBatch b;
  b.one_hot_targets = Tensor2::Zero(rows.rows(), num_sections);
  for (std::size_t i = 0; i < section_ids.size(); ++i) {
    const int s = section_ids[i];
    if (s < 0 || s >= num_sections)
      throw Error(ErrorCode::kBadSection, "section id " + std::to_string(s) + " outside [0, " +
                                              std::to_string(num_sections) + ")");
    b.one_hot_targets(static_cast<Eigen::Index>(i), s) = 1.0;
  }
  b.rows = std::move(rows);
  b.section_ids = std::move(section_ids);
  return b;
}

std::vector<double> AdaptiveWeights(std::span<const double> per_decoder) {
  double sum = 0.0;
  for (double l : per_decoder) sum += l;
  std::vector<double> w(per_decoder.size(), 0.0);
  if (sum > 0.0)
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = per_decoder[j] / sum;
  return w;
}

double WeightedReconstruction(std::span<const double> per_decoder, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t j = 0; j < per_decoder.size(); ++j) total += weights[j] * per_decoder[j];
  return total;
}

MixingCoefficients ComputeMixing(double l_rec, double l_aux) {
  const double sum = l_rec + l_aux;
  if (!(sum > 0.0)) return {};
  return {l_aux / sum, l_rec / sum};
}

double TotalLoss(double l_rec, double l_aux) {
  const MixingCoefficients c = ComputeMixing(l_rec, l_aux);
  if (!(l_rec + l_aux > 0.0)) return 0.0;
  return c.rec * l_rec + c.aux * l_aux;
}

void AegmGradients::SetZero() {
  encoder.SetZero();
  for (auto& d : decoders) d.SetZero();
  classifier.SetZero();
}

std::vector<std::span<double>> AegmGradients::GaeBlocks() {
  std::vector<std::span<double>> out = encoder.Blocks();
  for (auto& d : decoders)
    for (auto s : d.Blocks()) out.push_back(s);
  return out;
}

std::vector<std::span<double>> AegmGradients::ClassifierBlocks() {
  if (classifier.weight.size() == 0) return {};
  return classifier.Blocks();
}

AegmModel::AegmModel(AegmConfig config) : config_(std::move(config)) {
  config_.Validate();
  params_.encoder = BuildEncoder(config_);
  for (int j = 0; j < config_.num_sections; ++j) params_.decoders.push_back(BuildDecoder(config_));
  if (config_.use_classifier)
    params_.classifier =
        DenseLayer(config_.bottleneck_dim, config_.num_sections, Activation::kIdentity, false);
  params_.input_mean = Vector::Zero(config_.input_dim);
  params_.input_scale = Vector::Ones(config_.input_dim);
}

void AegmModel::InitGlorot(std::uint64_t seed) {
  Rng rng(seed);
  params_.encoder.InitGlorot(rng);
  for (auto& d : params_.decoders) d.InitGlorot(rng);
  if (config_.use_classifier) params_.classifier.InitGlorot(rng);
}

void AegmModel::FitInputNormalization(const Tensor2& rows) {
  if (rows.cols() != config_.input_dim)
    throw Error(ErrorCode::kShapeMismatch, "normalization rows do not match input_dim");
  if (rows.rows() == 0) throw Error(ErrorCode::kShapeMismatch, "cannot fit normalization on zero rows");
  const Vector mean = rows.colwise().mean().transpose();
  Vector scale =
      ((rows.rowwise() - mean.transpose()).array().square().colwise().mean().sqrt()).matrix().transpose();
  for (Eigen::Index i = 0; i < scale.size(); ++i)
    if (!(scale[i] > 1e-6)) scale[i] = 1.0;
  params_.input_mean = mean;
  params_.input_scale = scale;
}

Tensor2 AegmModel::Normalize(const Tensor2& rows) const {
  if (rows.cols() != config_.input_dim)
    throw Error(ErrorCode::kShapeMismatch, "feature rows have " + std::to_string(rows.cols()) +
                                               " columns, model expects " +
                                               std::to_string(config_.input_dim));
  return ((rows.rowwise() - params_.input_mean.transpose()).array().rowwise() /
          params_.input_scale.transpose().array())
      .matrix();
}

Tensor2 AegmModel::Encode(const Tensor2& rows) const {
  return params_.encoder.Infer(Normalize(rows));
}

Tensor2 AegmModel::DecodeGroup(const Tensor2& embeddings, int section) const {
  if (section < 0 || section >= num_decoders())
    throw Error(ErrorCode::kBadSection, "decoder index " + std::to_string(section) +
                                            " outside [0, " + std::to_string(num_decoders()) + ")");
  if (embeddings.cols() != config_.bottleneck_dim)
    throw Error(ErrorCode::kShapeMismatch, "embedding width does not match bottleneck_dim");
  return params_.decoders[static_cast<std::size_t>(section)].Infer(embeddings);
}

Tensor2 AegmModel::ClassifierLogits(const Tensor2& embeddings) const {
  if (!config_.use_classifier)
    throw Error(ErrorCode::kBadConfig, "model was built without the auxiliary classifier");
  if (embeddings.cols() != config_.bottleneck_dim)
    throw Error(ErrorCode::kShapeMismatch, "embedding width does not match bottleneck_dim");
  return params_.classifier.Infer(embeddings);
}

Tensor2 AegmModel::ClassifierProbs(const Tensor2& embeddings) const {
  Tensor2 p = nn::Softmax(ClassifierLogits(embeddings)).cwiseMax(kProbabilityClip);
  const Vector sums = p.rowwise().sum();
  return p.array().colwise() / sums.array();
}

LossBreakdown AegmModel::ComputeLosses(const GroupedBatch& batch, nn::Mode mode,
                                       AegmGradients* grads, const LossOptions& options) {
  const int m = num_decoders();
  if (batch.one_hot_targets.cols() != m)
    throw Error(ErrorCode::kShapeMismatch, "batch targets do not match the number of sections");
  if (batch.rows.rows() == 0) throw Error(ErrorCode::kShapeMismatch, "empty batch");

  const Tensor2 x = Normalize(batch.rows);
  nn::MlpCache enc_cache;
  const Tensor2 emb = params_.encoder.Forward(x, mode, grads ? &enc_cache : nullptr);

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < batch.section_ids.size(); ++i) {
    const int s = batch.section_ids[i];
    if (s < 0 || s >= m) throw Error(ErrorCode::kBadSection, "row routed to unknown decoder");
    members[static_cast<std::size_t>(s)].push_back(static_cast<Eigen::Index>(i));
  }

  LossBreakdown out;
  out.l_rec_per_decoder.assign(static_cast<std::size_t>(m), 0.0);
  std::vector<nn::MlpCache> dec_caches(static_cast<std::size_t>(m));
  std::vector<Tensor2> dec_grads(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const auto& idx = members[static_cast<std::size_t>(j)];
    if (idx.empty()) continue;  // contributes L_rec_j = 0, w_j = 0
    const Tensor2 recon = params_.decoders[static_cast<std::size_t>(j)].Forward(
        GatherRows(emb, idx), mode, grads ? &dec_caches[static_cast<std::size_t>(j)] : nullptr);
    nn::LossResult mse = nn::MseLoss(recon, GatherRows(x, idx), nn::Reduction::kBatchMean);
    out.l_rec_per_decoder[static_cast<std::size_t>(j)] = mse.value;
    dec_grads[static_cast<std::size_t>(j)] = std::move(mse.grad);
  }
  out.weights = AdaptiveWeights(out.l_rec_per_decoder);

  nn::LayerCache cls_cache;
  Tensor2 cls_grad;
  if (config_.use_classifier) {
    const Tensor2 logits = params_.classifier.Forward(emb, mode, grads ? &cls_cache : nullptr);
    nn::LossResult ce = nn::SoftmaxCrossEntropy(logits, batch.one_hot_targets);
    out.l_aux = ce.value;
    cls_grad = std::move(ce.grad);
  }

  // dL_total/dL_rec_j and dL_total/dL_aux.
  std::vector<double> coef_rec(static_cast<std::size_t>(m), 0.0);
  double coef_aux = 0.0;
  if (options.fixed) {
    const FixedWeighting& f = *options.fixed;
    if (static_cast<int>(f.weights.size()) != m)
      throw Error(ErrorCode::kShapeMismatch, "fixed weighting has the wrong number of weights");
    out.l_rec = WeightedReconstruction(out.l_rec_per_decoder, f.weights);
    const double rec_scale = config_.use_classifier ? f.mixing.rec : 1.0;
    out.l_total = config_.use_classifier ? f.mixing.rec * out.l_rec + f.mixing.aux * out.l_aux
                                         : out.l_rec;
    for (int j = 0; j < m; ++j) coef_rec[static_cast<std::size_t>(j)] = rec_scale * f.weights[static_cast<std::size_t>(j)];
    coef_aux = config_.use_classifier ? f.mixing.aux : 0.0;
  } else {
    out.l_rec = WeightedReconstruction(out.l_rec_per_decoder, out.weights);
    out.l_total = config_.use_classifier ? TotalLoss(out.l_rec, out.l_aux) : out.l_rec;

    // dL_rec/dL_j: w_j when detached, 2 w_j - sum_k w_k^2 otherwise.
    std::vector<double> drec(out.weights);
    if (options.differentiable_weights) {
      double sq = 0.0;
      for (double w : out.weights) sq += w * w;
      for (std::size_t j = 0; j < drec.size(); ++j)
        drec[j] = out.weights[j] > 0.0 ? 2.0 * out.weights[j] - sq : 0.0;
    }
    double d_total_d_rec = 1.0;
    if (config_.use_classifier) {
      const double sum = out.l_rec + out.l_aux;
      if (options.differentiable_weights && sum > 0.0) {
        d_total_d_rec = 2.0 * out.l_aux * out.l_aux / (sum * sum);
        coef_aux = 2.0 * out.l_rec * out.l_rec / (sum * sum);
      } else {
        const MixingCoefficients c = ComputeMixing(out.l_rec, out.l_aux);
        d_total_d_rec = c.rec;
        coef_aux = c.aux;
      }
    }
    for (int j = 0; j < m; ++j)
      coef_rec[static_cast<std::size_t>(j)] = d_total_d_rec * drec[static_cast<std::size_t>(j)];
  }

  if (grads) {
    if (grads->decoders.size() != params_.decoders.size()) *grads = ZeroGradients();
    grads->SetZero();
    Tensor2 d_emb = Tensor2::Zero(emb.rows(), emb.cols());
    for (int j = 0; j < m; ++j) {
      const auto& idx = members[static_cast<std::size_t>(j)];
      if (idx.empty()) continue;
      const Tensor2 g = params_.decoders[static_cast<std::size_t>(j)].Backward(
          dec_grads[static_cast<std::size_t>(j)] * coef_rec[static_cast<std::size_t>(j)],
          dec_caches[static_cast<std::size_t>(j)], grads->decoders[static_cast<std::size_t>(j)]);
      for (std::size_t i = 0; i < idx.size(); ++i) d_emb.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
    }
    if (config_.use_classifier)
      d_emb += params_.classifier.Backward(cls_grad * coef_aux, cls_cache, grads->classifier);
    params_.encoder.Backward(d_emb, enc_cache, grads->encoder);
  }
  return out;
}

AegmGradients AegmModel::ZeroGradients() const {
  AegmGradients g;
  g.encoder = params_.encoder.ZeroGrads();
  for (const auto& d : params_.decoders) g.decoders.push_back(d.ZeroGrads());
  if (config_.use_classifier) g.classifier = params_.classifier.ZeroGrads();
  return g;
}

std::vector<std::span<double>> AegmModel::GaeParameters() {
  std::vector<std::span<double>> out = params_.encoder.Parameters();
  for (auto& d : params_.decoders)
    for (auto s : d.Parameters()) out.push_back(s);
  return out;
}

std::vector<std::span<double>> AegmModel::ClassifierParameters() {
  if (!config_.use_classifier) return {};
  return params_.classifier.Parameters();
}

}  // namespace aegm
