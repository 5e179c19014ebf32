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

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "aegm/common/rng.hpp"
#include "aegm/eval/metrics.hpp"

namespace aegm::testing {

// Fraction of (anomaly, normal) pairs ordered correctly, ties worth half.
inline double BruteAuc(const std::vector<eval::LabeledScore>& v) {
  double credit = 0.0;
  long pairs = 0;
  for (const auto& a : v) {
    if (!a.anomaly) continue;
    for (const auto& n : v) {
      if (n.anomaly) continue;
      ++pairs;
      if (a.score > n.score) credit += 1.0;
      else if (a.score == n.score) credit += 0.5;
    }
  }
  return credit / static_cast<double>(pairs);
}

// One ROC point per distinct threshold t (predict anomaly when score >= t),
// swept from +inf down, then the exact area of the polygon left of max_fpr.
inline double BruteRawPartialArea(const std::vector<eval::LabeledScore>& v, double max_fpr) {
  std::set<double, std::greater<>> thresholds;
  double pos = 0, neg = 0;
  for (const auto& s : v) {
    thresholds.insert(s.score);
    (s.anomaly ? pos : neg) += 1.0;
  }
  std::vector<std::pair<double, double>> pts = {{0.0, 0.0}};
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (const auto& s : v)
      if (s.score >= t) (s.anomaly ? tp : fp) += 1.0;
    pts.emplace_back(fp / neg, tp / pos);
  }
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auto [x0, y0] = pts[i - 1];
    auto [x1, y1] = pts[i];
    if (x0 >= max_fpr) break;
    if (x1 > max_fpr) {
      y1 = y0 + (y1 - y0) * (max_fpr - x0) / (x1 - x0);
      x1 = max_fpr;
    }
    area += 0.5 * (x1 - x0) * (y0 + y1);
  }
  return area;
}

inline double BrutePauc(const std::vector<eval::LabeledScore>& v, double p) {
  const double raw = BruteRawPartialArea(v, p);
  const double lo = 0.5 * p * p, hi = p;
  return 0.5 * (1.0 + (raw - lo) / (hi - lo));
}

// 2..max_n scores with both classes present. With ties, scores are drawn
// from a handful of integers.
inline std::vector<eval::LabeledScore> RandomLabeled(Rng& rng, int max_n, bool ties = true) {
  const int n = 2 + static_cast<int>(UniformIndex(rng, static_cast<std::uint64_t>(max_n - 1)));
  const int levels = 1 + static_cast<int>(UniformIndex(rng, 8));
  std::vector<eval::LabeledScore> v(static_cast<std::size_t>(n));
  for (auto& s : v) {
    s.score = ties ? static_cast<double>(UniformIndex(rng, static_cast<std::uint64_t>(levels)))
                   : Uniform01(rng);
    s.anomaly = Uniform01(rng) < 0.5;
  }
  v[0].anomaly = false;
  v[1].anomaly = true;
  return v;
}

}  // namespace aegm::testing
