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

#include "aegm/nn/adam.hpp"

#include <cmath>

#include "aegm/common/error.hpp"

namespace aegm::nn {

void AdamStep(AdamState& state, std::span<const std::span<double>> params,
              std::span<const std::span<double>> grads) {
  if (params.size() != grads.size())
    throw Error(ErrorCode::kShapeMismatch, "adam: parameter and gradient block counts differ");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].size() != grads[i].size())
      throw Error(ErrorCode::kShapeMismatch, "adam: block " + std::to_string(i) + " size mismatch");

  if (state.m.empty() && state.step == 0) {
    for (const auto& p : params) {
      state.m.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
      state.v.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
    }
  }
  if (state.m.size() != params.size())
    throw Error(ErrorCode::kShapeMismatch, "adam: block layout changed between steps");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (static_cast<std::size_t>(state.m[i].size()) != params[i].size())
      throw Error(ErrorCode::kShapeMismatch, "adam: block " + std::to_string(i) + " resized");

  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double b1 = state.beta1, b2 = state.beta2;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto n = static_cast<Eigen::Index>(params[i].size());
    Eigen::Map<Eigen::ArrayXd> p(params[i].data(), n);
    Eigen::Map<const Eigen::ArrayXd> g(grads[i].data(), n);
    auto m = state.m[i].array();
    auto v = state.v[i].array();
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.square();
    p -= state.lr * (m / c1) / ((v / c2).sqrt() + state.eps);
  }
}

}  // namespace aegm::nn
