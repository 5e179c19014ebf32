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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace aegm::scoring {

enum class ScoreMode { kGae, kAc, kEns };

std::string ScoreModeName(ScoreMode mode);  // "gae" | "ac" | "ens"
ScoreMode ParseScoreMode(const std::string& name);

// anomaly_score_<machine>_section_<NN>_<mode>.csv
std::string ScoreFileName(const std::string& machine, int section_number, ScoreMode mode);

struct ScoreLine {
  std::string file_name;  // "<clip_id>.wav"
  double score = 0.0;
};

// DCASE submission shape: "<wav filename>,<score>" per line, no header.
void WriteScoreCsv(const std::filesystem::path& path, const std::vector<ScoreLine>& lines);
std::vector<ScoreLine> ReadScoreCsv(const std::filesystem::path& path);

}  // namespace aegm::scoring
