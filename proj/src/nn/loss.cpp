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

#include "aegm/nn/loss.hpp"

#include <cmath>
#include <string>

#include "aegm/common/error.hpp"

namespace aegm::nn {

LossResult MseLoss(const Tensor2& pred, const Tensor2& target, Reduction reduction) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw Error(ErrorCode::kShapeMismatch, "mse: prediction and target shapes differ");
  LossResult r;
  const Tensor2 diff = pred - target;
  r.value = diff.squaredNorm();
  r.grad = 2.0 * diff;
  if (reduction == Reduction::kBatchMean && pred.rows() > 0) {
    const double n = static_cast<double>(pred.rows());
    r.value /= n;
    r.grad /= n;
  }
  return r;
}

Tensor2 Softmax(const Tensor2& logits) {
  Tensor2 shifted = logits.colwise() - logits.rowwise().maxCoeff();
  Tensor2 e = shifted.array().exp().matrix();
  const Vector sums = e.rowwise().sum();
  return e.array().colwise() / sums.array();
}

LossResult SoftmaxCrossEntropy(const Tensor2& logits, const Tensor2& one_hot) {
  if (logits.rows() != one_hot.rows() || logits.cols() != one_hot.cols())
    throw Error(ErrorCode::kShapeMismatch, "cross-entropy: logits and targets shapes differ");
  if (logits.cols() < 2) throw Error(ErrorCode::kBadTarget, "cross-entropy needs at least 2 classes");
  for (Eigen::Index r = 0; r < one_hot.rows(); ++r) {
    int ones = 0;
    for (Eigen::Index c = 0; c < one_hot.cols(); ++c) {
      const double v = one_hot(r, c);
      if (v == 1.0) ++ones;
      else if (v != 0.0) ones = -1000;
    }
    if (ones != 1)
      throw Error(ErrorCode::kBadTarget, "target row " + std::to_string(r) + " is not one-hot");
  }

  Tensor2 shifted = logits.colwise() - logits.rowwise().maxCoeff();
  const Vector log_sum = shifted.array().exp().rowwise().sum().log();
  const Tensor2 log_probs = shifted.colwise() - log_sum;
  const double n = static_cast<double>(logits.rows());
  LossResult r;
  r.value = n > 0 ? -(one_hot.array() * log_probs.array()).sum() / n : 0.0;
  r.grad = n > 0 ? Tensor2((log_probs.array().exp().matrix() - one_hot) / n)
                 : Tensor2::Zero(logits.rows(), logits.cols());
  return r;
}

}  // namespace aegm::nn
