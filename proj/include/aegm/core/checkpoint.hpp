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
#include <string>
#include <utility>
#include <vector>

#include "aegm/core/model.hpp"

namespace aegm {

inline constexpr std::string_view kCheckpointMagic = "AEGMCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string machine;
  // (dataset section number, decoder index) pairs. With group decoders the
  // mapping is one-to-one; a shared-decoder model maps every section to 0.
  std::vector<std::pair<int, int>> section_to_decoder;
  std::uint64_t feature_config_hash = 0;
  std::string feature_config;
  std::uint64_t seed = 0;
  int epoch = 0;

  // Decoder index for a dataset section number; BadSection when unmapped.
  int DecoderFor(int section_number) const;
};

// Parameters are stored as float32 in declaration order: input mean and
// scale, encoder layers, decoders, classifier. Each layer contributes W, b
// and, with BN, gamma, beta, running mean, running variance.
void SaveCheckpoint(const std::filesystem::path& path, const AegmModel& model,
                    const CheckpointMeta& meta);

AegmModel LoadCheckpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

}  // namespace aegm
