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

#include "aegm/common/tensor.hpp"

namespace aegm::nn {

enum class Reduction {
  kSum,        // sum over rows and features
  kBatchMean,  // sum over features, mean over rows
};

struct LossResult {
  double value = 0.0;
  Tensor2 grad;  // dL/dpred, same shape as the prediction
};

// Squared L2 error, summed over the feature dimension.
LossResult MseLoss(const Tensor2& pred, const Tensor2& target,
                   Reduction reduction = Reduction::kBatchMean);

// Row-wise softmax with max subtraction.
Tensor2 Softmax(const Tensor2& logits);

// Mean over rows of -log softmax(logits)[target]; targets must be one-hot
// (BadTarget otherwise). Evaluated in log-space so the loss stays finite.
LossResult SoftmaxCrossEntropy(const Tensor2& logits, const Tensor2& one_hot);

}  // namespace aegm::nn
