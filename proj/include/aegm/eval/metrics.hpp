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

namespace aegm::eval {

struct LabeledScore {
  double score = 0.0;
  bool anomaly = false;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Mann-Whitney statistic: the fraction of (anomaly, normal) pairs ranked
// correctly, ties counting one half. OneClassOnly without both labels.
double Auc(std::span<const LabeledScore> scores);

// ROC vertices from (0,0) to (1,1), one per distinct score threshold.
std::vector<RocPoint> RocCurve(std::span<const LabeledScore> scores);

// Raw area under the ROC curve over FPR in [0, max_fpr], linear
// interpolation at max_fpr.
double PartialAreaRaw(std::span<const LabeledScore> scores, double max_fpr);

// McClish-standardized partial AUC: 0.5 (1 + (A - p^2/2) / (p - p^2/2)).
// BadP unless 0 < p <= 1.
double Pauc(std::span<const LabeledScore> scores, double p = 0.1);

}  // namespace aegm::eval
