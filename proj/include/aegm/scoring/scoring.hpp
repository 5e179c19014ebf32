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
#include <string>
#include <vector>

#include "aegm/audio/features.hpp"
#include "aegm/core/model.hpp"

namespace aegm::scoring {

enum class Label { kNormal, kAnomaly, kUnknown };

std::string LabelName(Label label);
Label ParseLabel(const std::string& name);  // BadConfig on unknown names

struct ScoreRecord {
  std::string clip_id;
  int section_id = 0;  // dataset section number
  Label label = Label::kUnknown;
  double a_rec = 0.0;
  double a_aux = 0.0;
  std::optional<double> a_ens;
};

enum class ProbAggregation {
  kMeanProbability,  // average row probabilities, then take the log-odds
  kMeanScore,        // average the per-row log-odds
};

// log((1 - p) / p) with p clipped to [1e-7, 1 - 1e-7].
double AuxScoreFromProbability(double p);

// Mean over the clip's rows of the squared reconstruction error through
// decoder `decoder` (normalized feature space).
double ScoreRec(const AegmModel& model, const audio::FeatureMatrix& clip, int decoder);

// Log-odds against the clip belonging to `decoder`'s section.
double ScoreAux(const AegmModel& model, const audio::FeatureMatrix& clip, int decoder,
                ProbAggregation aggregation = ProbAggregation::kMeanProbability);

struct ClipScores {
  double a_rec = 0.0;
  double a_aux = 0.0;  // 0 when the model has no classifier
  Vector mean_probs;   // per-class mean probability over rows (empty without classifier)
};

// Both scores with a single encoder pass.
ClipScores ScoreClip(const AegmModel& model, const audio::FeatureMatrix& clip, int decoder,
                     ProbAggregation aggregation = ProbAggregation::kMeanProbability);

// Zero mean, unit population variance; all zeros when the variance is 0.
std::vector<double> MvNormalize(std::span<const double> scores);

enum class EnsembleGrouping { kPerSection, kGlobal };

// a_ens = (mv(a_rec) + mv(a_aux)) / 2 within each group; GroupTooSmall when
// a group holds fewer than 2 records.
void Ensemble(std::vector<ScoreRecord>& records, EnsembleGrouping grouping);

}  // namespace aegm::scoring
