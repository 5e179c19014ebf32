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

#include "aegm/scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aegm/common/error.hpp"

namespace aegm::scoring {

std::string LabelName(Label label) {
  switch (label) {
    case Label::kNormal: return "normal";
    case Label::kAnomaly: return "anomaly";
    case Label::kUnknown: return "unknown";
  }
  return "unknown";
}

Label ParseLabel(const std::string& name) {
  if (name == "normal") return Label::kNormal;
  if (name == "anomaly") return Label::kAnomaly;
  if (name == "unknown") return Label::kUnknown;
  throw Error(ErrorCode::kBadConfig, "unknown label '" + name + "'");
}

double AuxScoreFromProbability(double p) {
  const double q = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
  return std::log((1.0 - q) / q);
}

ClipScores ScoreClip(const AegmModel& model, const audio::FeatureMatrix& clip, int decoder,
                     ProbAggregation aggregation) {
  if (decoder < 0 || decoder >= model.num_decoders())
    throw Error(ErrorCode::kBadSection, "decoder index " + std::to_string(decoder) + " out of range");
  if (clip.rows.rows() == 0) throw Error(ErrorCode::kShapeMismatch, "clip '" + clip.clip_id + "' has no rows");
  const Tensor2 x = model.Normalize(clip.rows);
  const Tensor2 emb = model.params().encoder.Infer(x);
  const Tensor2 recon = model.DecodeGroup(emb, decoder);

  ClipScores out;
  out.a_rec = (recon - x).rowwise().squaredNorm().mean();
  if (model.config().use_classifier) {
    const Tensor2 probs = model.ClassifierProbs(emb);
    out.mean_probs = probs.colwise().mean().transpose();
    if (aggregation == ProbAggregation::kMeanProbability) {
      out.a_aux = AuxScoreFromProbability(out.mean_probs[decoder]);
    } else {
      double sum = 0.0;
      for (Eigen::Index r = 0; r < probs.rows(); ++r) sum += AuxScoreFromProbability(probs(r, decoder));
      out.a_aux = sum / static_cast<double>(probs.rows());
    }
  }
  return out;
}

double ScoreRec(const AegmModel& model, const audio::FeatureMatrix& clip, int decoder) {
  return ScoreClip(model, clip, decoder).a_rec;
}

double ScoreAux(const AegmModel& model, const audio::FeatureMatrix& clip, int decoder,
                ProbAggregation aggregation) {
  if (!model.config().use_classifier)
    throw Error(ErrorCode::kBadConfig, "model was built without the auxiliary classifier");
  return ScoreClip(model, clip, decoder, aggregation).a_aux;
}

std::vector<double> MvNormalize(std::span<const double> scores) {
  std::vector<double> out(scores.size(), 0.0);
  if (scores.empty()) return out;
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scores.size());
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) return out;
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - mean) / sd;
  return out;
}

void Ensemble(std::vector<ScoreRecord>& records, EnsembleGrouping grouping) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i)
    groups[grouping == EnsembleGrouping::kPerSection ? records[i].section_id : 0].push_back(i);
  for (const auto& [key, idx] : groups) {
    if (idx.size() < 2)
      throw Error(ErrorCode::kGroupTooSmall, "ensemble group " + std::to_string(key) + " has " +
                                                 std::to_string(idx.size()) + " record(s)");
    std::vector<double> rec, aux;
    for (std::size_t i : idx) {
      rec.push_back(records[i].a_rec);
      aux.push_back(records[i].a_aux);
    }
    const auto nr = MvNormalize(rec);
    const auto na = MvNormalize(aux);
    for (std::size_t k = 0; k < idx.size(); ++k) records[idx[k]].a_ens = 0.5 * (nr[k] + na[k]);
  }
  if (groups.empty()) throw Error(ErrorCode::kGroupTooSmall, "no records to ensemble");
}

}  // namespace aegm::scoring
