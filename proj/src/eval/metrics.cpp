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

#include "aegm/eval/metrics.hpp"

#include <algorithm>
#include <string>

#include "aegm/common/error.hpp"

namespace aegm::eval {
namespace {

void CountClasses(std::span<const LabeledScore> scores, double& positives, double& negatives) {
  positives = negatives = 0.0;
  for (const auto& s : scores) (s.anomaly ? positives : negatives) += 1.0;
  if (positives == 0.0 || negatives == 0.0)
    throw Error(ErrorCode::kOneClassOnly, "need at least one normal and one anomalous score (got " +
                                              std::to_string(static_cast<long>(negatives)) +
                                              " normal, " + std::to_string(static_cast<long>(positives)) +
                                              " anomalous)");
}

}  // namespace

double Auc(std::span<const LabeledScore> scores) {
  double pos, neg;
  CountClasses(scores, pos, neg);
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });
  // Sum of mid-ranks of the anomalies.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    double group_pos = 0.0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      if (sorted[j].anomaly) group_pos += 1.0;
      ++j;
    }
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += group_pos * mid_rank;
    i = j;
  }
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

std::vector<RocPoint> RocCurve(std::span<const LabeledScore> scores) {
  double pos, neg;
  CountClasses(scores, pos, neg);
  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score > b.score; });
  std::vector<RocPoint> roc{{0.0, 0.0}};
  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      (sorted[j].anomaly ? tp : fp) += 1.0;
      ++j;
    }
    roc.push_back({fp / neg, tp / pos});
    i = j;
  }
  return roc;
}

double PartialAreaRaw(std::span<const LabeledScore> scores, double max_fpr) {
  if (!(max_fpr > 0.0 && max_fpr <= 1.0))
    throw Error(ErrorCode::kBadP, "p must satisfy 0 < p <= 1");
  const auto roc = RocCurve(scores);
  double area = 0.0;
  for (std::size_t k = 1; k < roc.size(); ++k) {
    const RocPoint a = roc[k - 1], b = roc[k];
    if (a.fpr >= max_fpr) break;
    if (b.fpr <= max_fpr) {
      area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    } else {
      const double y = a.tpr + (b.tpr - a.tpr) * (max_fpr - a.fpr) / (b.fpr - a.fpr);
      area += (max_fpr - a.fpr) * (a.tpr + y) / 2.0;
      break;
    }
  }
  return area;
}

double Pauc(std::span<const LabeledScore> scores, double p) {
  const double raw = PartialAreaRaw(scores, p);
  const double min_area = 0.5 * p * p;
  const double max_area = p;
  return 0.5 * (1.0 + (raw - min_area) / (max_area - min_area));
}

}  // namespace aegm::eval
