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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aegm/audio/features.hpp"
#include "aegm/core/model.hpp"
#include "aegm/data/synth.hpp"
#include "aegm/scoring/scoring.hpp"
#include "aegm/train/trainer.hpp"

namespace aegm::cli {

struct KeyInfo {
  std::string key;
  std::string default_value;
  std::string help;
};

// Every recognized setting with its default, in echo order.
const std::vector<KeyInfo>& KnownKeys();

// "lr_gae" -> "--lr-gae"; "lr_gae" -> "AEGM_LR_GAE".
std::string FlagName(const std::string& key);
std::string EnvName(const std::string& key);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup ProcessEnv();

// Flat key=value settings. Layers are applied lowest precedence first:
// defaults, config file, AEGM_* environment, command-line flags.
class RunConfig {
 public:
  RunConfig();  // defaults only

  // Lines of key=value; '#' starts a comment. Unknown keys are BadConfig.
  void ApplyFile(const std::filesystem::path& path);
  void ApplyEnv(const EnvLookup& env);
  void Set(const std::string& key, const std::string& value, const std::string& source);

  const std::string& Get(const std::string& key) const;
  int GetInt(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  bool GetBool(const std::string& key) const;
  std::uint64_t GetU64(const std::string& key) const;
  std::vector<std::string> GetList(const std::string& key) const;

  // Builds every typed view once so bad values fail before any work starts.
  void Validate() const;

  using PathList = std::vector<std::pair<std::string, std::filesystem::path>>;

  // Sorted "key=value  # source" lines, then "path.<name>=..." lines.
  std::string Render(const PathList& paths = {}) const;
  // Writes Render() to `path`, typically <output dir>/run_config.resolved.
  void WriteResolved(const std::filesystem::path& path, const PathList& paths = {}) const;

  audio::FeatureConfig FeatureConfigFor(const std::string& machine) const;
  std::optional<train::AugmentConfig> AugmentFor(const std::string& machine,
                                                 const audio::FeatureConfig& features) const;
  AegmConfig ModelConfig(int input_dim, int num_decoders) const;
  train::TrainConfig TrainConfigFor(const std::string& machine,
                                    const audio::FeatureConfig& features) const;
  data::SynthSpec SynthSpecFor(const std::string& machine) const;
  scoring::EnsembleGrouping Grouping() const;
  scoring::ProbAggregation Aggregation() const;

 private:
  struct Entry {
    std::string value;
    std::string source;
  };
  std::map<std::string, Entry> values_;
};

// Defaults < file < env < flags, then Validate().
RunConfig ResolveRunConfig(const std::map<std::string, std::string>& flags,
                           const std::optional<std::filesystem::path>& config_file,
                           const EnvLookup& env);

}  // namespace aegm::cli
