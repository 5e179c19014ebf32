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

#include <span>
#include <vector>

#include "aegm/common/tensor.hpp"

namespace aegm::nn {

struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Vector> m;  // first moments, one per parameter block
  std::vector<Vector> v;  // second moments

  explicit AdamState(double learning_rate = 0.001) : lr(learning_rate) {}
};

// One bias-corrected Adam update over matching parameter/gradient blocks.
// Moment buffers are allocated on the first call; afterwards the block
// layout must not change (ShapeMismatch).
void AdamStep(AdamState& state, std::span<const std::span<double>> params,
              std::span<const std::span<double>> grads);

}  // namespace aegm::nn
