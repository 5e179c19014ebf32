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

#include "aegm/audio/features.hpp"

namespace aegm::audio {

inline constexpr std::string_view kFeatureMagic = "AEGMFEAT";
inline constexpr std::uint32_t kFeatureVersion = 1;

struct FeatureFileHeader {
  std::string clip_id;
  int section_id = 0;
  long rows = 0;
  long dim = 0;
  FeatureKind kind = FeatureKind::kLogMel;
  std::uint64_t config_hash = 0;
};

void WriteFeatureFile(const std::filesystem::path& path, const FeatureMatrix& features,
                      const FeatureConfig& cfg);

FeatureFileHeader ReadFeatureHeader(const std::filesystem::path& path);

// Throws ConfigHashMismatch when expected_hash is non-zero and differs.
FeatureMatrix ReadFeatureFile(const std::filesystem::path& path, std::uint64_t expected_hash = 0,
                              FeatureFileHeader* header = nullptr);

}  // namespace aegm::audio
