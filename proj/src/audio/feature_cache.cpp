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

#include "aegm/audio/feature_cache.hpp"

#include "aegm/common/container.hpp"
#include "aegm/common/error.hpp"
#include "aegm/common/hash.hpp"

namespace aegm::audio {
namespace {

FeatureFileHeader ParseHeader(const Container& c, const std::filesystem::path& path) {
  if (c.version != kFeatureVersion)
    throw Error(ErrorCode::kUnsupportedFormat,
                path.string() + ": feature file version " + std::to_string(c.version));
  FeatureFileHeader h;
  h.clip_id = c.Get("clip_id");
  h.section_id = static_cast<int>(c.GetInt("section_id"));
  h.rows = static_cast<long>(c.GetInt("rows"));
  h.dim = static_cast<long>(c.GetInt("dim"));
  h.kind = ParseFeatureKind(c.Get("feature_kind"));
  h.config_hash = std::stoull(c.Get("config_hash"), nullptr, 16);
  return h;
}

}  // namespace

void WriteFeatureFile(const std::filesystem::path& path, const FeatureMatrix& features,
                      const FeatureConfig& cfg) {
  Container c;
  c.magic = std::string(kFeatureMagic);
  c.version = kFeatureVersion;
  c.Set("clip_id", features.clip_id);
  c.Set("section_id", std::to_string(features.section_id));
  c.Set("rows", std::to_string(features.rows.rows()));
  c.Set("dim", std::to_string(features.rows.cols()));
  c.Set("feature_kind", FeatureKindName(cfg.kind));
  c.Set("config_hash", HashToHex(cfg.Hash()));
  c.Set("config", cfg.Canonical());
  c.payload.resize(static_cast<std::size_t>(features.rows.size()));
  for (Eigen::Index i = 0; i < features.rows.size(); ++i)
    c.payload[static_cast<std::size_t>(i)] = static_cast<float>(features.rows.data()[i]);
  WriteContainer(path, c);
}

FeatureFileHeader ReadFeatureHeader(const std::filesystem::path& path) {
  return ParseHeader(ReadContainer(path, kFeatureMagic, /*header_only=*/true), path);
}

FeatureMatrix ReadFeatureFile(const std::filesystem::path& path, std::uint64_t expected_hash,
                              FeatureFileHeader* header) {
  const Container c = ReadContainer(path, kFeatureMagic);
  const FeatureFileHeader h = ParseHeader(c, path);
  if (expected_hash != 0 && h.config_hash != expected_hash)
    throw Error(ErrorCode::kConfigHashMismatch,
                path.string() + ": features were produced under config " + HashToHex(h.config_hash) +
                    ", expected " + HashToHex(expected_hash));
  if (static_cast<long>(c.payload.size()) != h.rows * h.dim)
    throw Error(ErrorCode::kCorruptFile, path.string() + ": payload size disagrees with rows x dim");
  FeatureMatrix fm;
  fm.clip_id = h.clip_id;
  fm.section_id = h.section_id;
  fm.rows.resize(h.rows, h.dim);
  for (std::size_t i = 0; i < c.payload.size(); ++i) fm.rows.data()[i] = c.payload[i];
  if (header) *header = h;
  return fm;
}

}  // namespace aegm::audio
