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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aegm/audio/features.hpp"
#include "aegm/core/checkpoint.hpp"
#include "aegm/core/model.hpp"

namespace aegm::train {

struct AugmentConfig {
  audio::ShuffleConfig shuffle;
  int per_frame_dim = 128;
  int context_frames = 5;
};

struct TrainConfig {
  int epochs = 600;
  int batch_size = 32;
  double lr_gae = 0.001;   // shared encoder + group decoders
  double lr_ac = 0.00001;  // auxiliary classifier head
  std::uint64_t seed = 0;
  std::optional<AugmentConfig> augment;
  bool differentiable_weights = false;

  // Checkpoints go to checkpoint_dir/ckpt_epoch_{N}.aegm every
  // checkpoint_every epochs and after the final epoch. Nothing is written
  // when checkpoint_dir is empty; checkpoint_every == 0 means final only.
  std::filesystem::path checkpoint_dir;
  int checkpoint_every = 0;
  CheckpointMeta checkpoint_meta;

  void Validate(int num_sections) const;  // BadConfig
};

// All training rows stacked, with the decoder index of each row.
struct TrainingSet {
  Tensor2 rows;
  std::vector<int> sections;
  int num_sections = 0;

  // FeatureMatrix::section_id must already be a decoder index.
  static TrainingSet FromFeatures(std::span<const audio::FeatureMatrix> clips, int num_sections);
};

// Row indices of each batch of one epoch. Rows of every section are
// shuffled by (seed, epoch, section) and interleaved by their relative
// position so each batch carries each section in proportion.
std::vector<std::vector<Eigen::Index>> MakeBatchIndices(std::span<const int> sections,
                                                        int num_sections, int batch_size,
                                                        std::uint64_t seed, int epoch);

std::vector<GroupedBatch> MakeBatches(const TrainingSet& set, const TrainConfig& cfg, int epoch);

struct TrainLogEntry {
  int epoch = 0;
  LossBreakdown mean;  // row-weighted means over the epoch's batches
  double seconds = 0.0;
};

struct TrainResult {
  AegmModel model;
  std::vector<TrainLogEntry> log;
};

// Seeded Glorot init plus input standardization fitted on set.rows.
AegmModel InitModel(const TrainingSet& set, const AegmConfig& model_cfg, const TrainConfig& cfg);

using EpochCallback = std::function<void(const TrainLogEntry&)>;

// Joint optimization of L_total with one Adam instance per parameter group.
// Throws NonFiniteLoss naming the epoch and batch on divergence.
TrainResult Train(const TrainingSet& set, const AegmConfig& model_cfg, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

std::filesystem::path CheckpointPath(const std::filesystem::path& dir, int epoch);

// train_log.csv: epoch,l_total,l_rec,l_aux,w_0..w_{M-1},seconds
void WriteTrainLogHeader(const std::filesystem::path& path, int num_sections);
void AppendTrainLog(const std::filesystem::path& path, const TrainLogEntry& entry);

}  // namespace aegm::train
