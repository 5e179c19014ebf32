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

#include "aegm/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <tuple>

#include "aegm/common/error.hpp"
#include "aegm/common/hash.hpp"
#include "aegm/common/rng.hpp"
#include "aegm/nn/adam.hpp"

namespace aegm::train {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSamplerStream = 2;
constexpr std::uint64_t kAugmentStream = 3;

bool AllFinite(const LossBreakdown& lb) {
  if (!std::isfinite(lb.l_total) || !std::isfinite(lb.l_rec) || !std::isfinite(lb.l_aux)) return false;
  for (double v : lb.l_rec_per_decoder)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void TrainConfig::Validate(int num_sections) const {
  if (epochs < 1) throw Error(ErrorCode::kBadConfig, "epochs must be >= 1");
  if (batch_size < num_sections)
    throw Error(ErrorCode::kBadConfig, "batch_size must be at least the number of sections");
  if (lr_gae < 0 || lr_ac < 0) throw Error(ErrorCode::kBadConfig, "learning rates must be non-negative");
  if (checkpoint_every < 0) throw Error(ErrorCode::kBadConfig, "checkpoint_every must be >= 0");
}

TrainingSet TrainingSet::FromFeatures(std::span<const audio::FeatureMatrix> clips, int num_sections) {
  TrainingSet set;
  set.num_sections = num_sections;
  Eigen::Index total = 0, dim = -1;
  for (const auto& c : clips) {
    if (dim >= 0 && c.rows.cols() != dim)
      throw Error(ErrorCode::kShapeMismatch, "clip '" + c.clip_id + "' has a different feature width");
    dim = c.rows.cols();
    total += c.rows.rows();
  }
  if (total == 0) throw Error(ErrorCode::kMissingSection, "training set is empty");
  set.rows.resize(total, dim);
  set.sections.reserve(static_cast<std::size_t>(total));
  Eigen::Index at = 0;
  for (const auto& c : clips) {
    if (c.section_id < 0 || c.section_id >= num_sections)
      throw Error(ErrorCode::kBadSection, "clip '" + c.clip_id + "' has section " +
                                              std::to_string(c.section_id));
    set.rows.middleRows(at, c.rows.rows()) = c.rows;
    at += c.rows.rows();
    set.sections.insert(set.sections.end(), static_cast<std::size_t>(c.rows.rows()), c.section_id);
  }
  return set;
}

std::vector<std::vector<Eigen::Index>> MakeBatchIndices(std::span<const int> sections,
                                                        int num_sections, int batch_size,
                                                        std::uint64_t seed, int epoch) {
  if (batch_size < 1) throw Error(ErrorCode::kBadConfig, "batch_size must be positive");
  std::vector<std::vector<Eigen::Index>> by_section(static_cast<std::size_t>(num_sections));
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const int s = sections[i];
    if (s < 0 || s >= num_sections) throw Error(ErrorCode::kBadSection, "row section out of range");
    by_section[static_cast<std::size_t>(s)].push_back(static_cast<Eigen::Index>(i));
  }
  for (int s = 0; s < num_sections; ++s) {
    if (by_section[static_cast<std::size_t>(s)].empty())
      throw Error(ErrorCode::kMissingSection, "section " + std::to_string(s) + " has no training rows");
    Rng rng(DeriveSeed(seed, {kSamplerStream, static_cast<std::uint64_t>(epoch),
                              static_cast<std::uint64_t>(s)}));
    FisherYates(by_section[static_cast<std::size_t>(s)], rng);
  }

  // Stratified interleave: row k of a section with n rows sits at (k+0.5)/n.
  std::vector<std::tuple<double, int, Eigen::Index>> order;
  order.reserve(sections.size());
  for (int s = 0; s < num_sections; ++s) {
    const auto& rows = by_section[static_cast<std::size_t>(s)];
    const double n = static_cast<double>(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
      order.emplace_back((static_cast<double>(k) + 0.5) / n, s, rows[k]);
  }
  std::sort(order.begin(), order.end());

  std::vector<std::vector<Eigen::Index>> batches;
  for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(batch_size)) {
    auto& b = batches.emplace_back();
    for (std::size_t k = i; k < std::min(order.size(), i + batch_size); ++k)
      b.push_back(std::get<2>(order[k]));
  }
  return batches;
}

std::vector<GroupedBatch> MakeBatches(const TrainingSet& set, const TrainConfig& cfg, int epoch) {
  std::vector<GroupedBatch> out;
  for (const auto& idx : MakeBatchIndices(set.sections, set.num_sections, cfg.batch_size, cfg.seed, epoch)) {
    Tensor2 rows(static_cast<Eigen::Index>(idx.size()), set.rows.cols());
    std::vector<int> secs(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = set.rows.row(idx[i]);
      secs[i] = set.sections[static_cast<std::size_t>(idx[i])];
    }
    out.push_back(GroupedBatch::Make(std::move(rows), std::move(secs), set.num_sections));
  }
  return out;
}

AegmModel InitModel(const TrainingSet& set, const AegmConfig& model_cfg, const TrainConfig& cfg) {
  if (set.rows.cols() != model_cfg.input_dim)
    throw Error(ErrorCode::kShapeMismatch, "feature dimension " + std::to_string(set.rows.cols()) +
                                               " does not match model input_dim " +
                                               std::to_string(model_cfg.input_dim));
  if (set.num_sections != model_cfg.num_sections)
    throw Error(ErrorCode::kBadConfig, "training set and model disagree on the number of sections");
  AegmModel model(model_cfg);
  model.InitGlorot(DeriveSeed(cfg.seed, {kInitStream}));
  model.FitInputNormalization(set.rows);
  return model;
}

std::filesystem::path CheckpointPath(const std::filesystem::path& dir, int epoch) {
  return dir / ("ckpt_epoch_" + std::to_string(epoch) + ".aegm");
}

TrainResult Train(const TrainingSet& set, const AegmConfig& model_cfg, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.Validate(model_cfg.num_sections);
  TrainResult result{InitModel(set, model_cfg, cfg), {}};
  AegmModel& model = result.model;
  const int m = model.num_decoders();

  nn::AdamState gae_opt(cfg.lr_gae);
  nn::AdamState ac_opt(cfg.lr_ac);
  AegmGradients grads = model.ZeroGradients();
  LossOptions options;
  options.differentiable_weights = cfg.differentiable_weights;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto batches = MakeBatchIndices(set.sections, set.num_sections, cfg.batch_size, cfg.seed, epoch);
    TrainLogEntry entry;
    entry.epoch = epoch;
    entry.mean.l_rec_per_decoder.assign(static_cast<std::size_t>(m), 0.0);
    entry.mean.weights.assign(static_cast<std::size_t>(m), 0.0);
    double rows_seen = 0.0;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      Tensor2 rows(static_cast<Eigen::Index>(idx.size()), set.rows.cols());
      std::vector<int> secs(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        rows.row(static_cast<Eigen::Index>(i)) = set.rows.row(idx[i]);
        secs[i] = set.sections[static_cast<std::size_t>(idx[i])];
      }
      if (cfg.augment) {
        Rng rng(DeriveSeed(cfg.seed, {kAugmentStream, static_cast<std::uint64_t>(epoch), b}));
        audio::ShuffleLowFreq(rows, cfg.augment->per_frame_dim, cfg.augment->context_frames,
                              cfg.augment->shuffle, rng);
      }
      const GroupedBatch batch = GroupedBatch::Make(std::move(rows), std::move(secs), m);
      const LossBreakdown lb = model.ComputeLosses(batch, nn::Mode::kTrain, &grads, options);
      if (!AllFinite(lb))
        throw Error(ErrorCode::kNonFiniteLoss, "non-finite loss at epoch " + std::to_string(epoch) +
                                                   ", batch " + std::to_string(b) +
                                                   " (l_total=" + FormatExact(lb.l_total) + ")");
      const auto gae_params = model.GaeParameters();
      const auto gae_grads = grads.GaeBlocks();
      nn::AdamStep(gae_opt, gae_params, gae_grads);
      if (model_cfg.use_classifier) {
        const auto ac_params = model.ClassifierParameters();
        const auto ac_grads = grads.ClassifierBlocks();
        nn::AdamStep(ac_opt, ac_params, ac_grads);
      }

      const double n = static_cast<double>(idx.size());
      rows_seen += n;
      entry.mean.l_total += n * lb.l_total;
      entry.mean.l_rec += n * lb.l_rec;
      entry.mean.l_aux += n * lb.l_aux;
      for (int j = 0; j < m; ++j) {
        entry.mean.l_rec_per_decoder[static_cast<std::size_t>(j)] += n * lb.l_rec_per_decoder[static_cast<std::size_t>(j)];
        entry.mean.weights[static_cast<std::size_t>(j)] += n * lb.weights[static_cast<std::size_t>(j)];
      }
    }

    entry.mean.l_total /= rows_seen;
    entry.mean.l_rec /= rows_seen;
    entry.mean.l_aux /= rows_seen;
    for (int j = 0; j < m; ++j) {
      entry.mean.l_rec_per_decoder[static_cast<std::size_t>(j)] /= rows_seen;
      entry.mean.weights[static_cast<std::size_t>(j)] /= rows_seen;
    }
    entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    const bool scheduled = cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0;
    if (!cfg.checkpoint_dir.empty() && (scheduled || epoch == cfg.epochs)) {
      CheckpointMeta meta = cfg.checkpoint_meta;
      meta.seed = cfg.seed;
      meta.epoch = epoch;
      SaveCheckpoint(CheckpointPath(cfg.checkpoint_dir, epoch), model, meta);
    }
  }
  return result;
}

void WriteTrainLogHeader(const std::filesystem::path& path, int num_sections) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << "epoch,l_total,l_rec,l_aux";
  for (int j = 0; j < num_sections; ++j) out << ",w_" << j;
  out << ",seconds\n";
}

void AppendTrainLog(const std::filesystem::path& path, const TrainLogEntry& entry) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << entry.epoch << ',' << FormatExact(entry.mean.l_total) << ',' << FormatExact(entry.mean.l_rec)
      << ',' << FormatExact(entry.mean.l_aux);
  for (double w : entry.mean.weights) out << ',' << FormatExact(w);
  char secs[32];
  std::snprintf(secs, sizeof(secs), "%.3f", entry.seconds);
  out << ',' << secs << '\n';
}

}  // namespace aegm::train
