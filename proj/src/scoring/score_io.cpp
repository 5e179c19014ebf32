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

#include "aegm/scoring/score_io.hpp"

#include <cstdio>
#include <fstream>

#include "aegm/common/error.hpp"
#include "aegm/common/hash.hpp"

namespace aegm::scoring {

std::string ScoreModeName(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kGae: return "gae";
    case ScoreMode::kAc: return "ac";
    case ScoreMode::kEns: return "ens";
  }
  return "gae";
}

ScoreMode ParseScoreMode(const std::string& name) {
  if (name == "gae") return ScoreMode::kGae;
  if (name == "ac") return ScoreMode::kAc;
  if (name == "ens" || name == "ensemble") return ScoreMode::kEns;
  throw Error(ErrorCode::kBadConfig, "unknown score mode '" + name + "' (gae|ac|ens)");
}

std::string ScoreFileName(const std::string& machine, int section_number, ScoreMode mode) {
  char sec[16];
  std::snprintf(sec, sizeof(sec), "%02d", section_number);
  return "anomaly_score_" + machine + "_section_" + sec + "_" + ScoreModeName(mode) + ".csv";
}

void WriteScoreCsv(const std::filesystem::path& path, const std::vector<ScoreLine>& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  for (const auto& l : lines) out << l.file_name << ',' << FormatExact(l.score) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::vector<ScoreLine> ReadScoreCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<ScoreLine> lines;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::kCorruptFile, path.string() + ":" + std::to_string(lineno) + ": missing comma");
    ScoreLine l;
    l.file_name = line.substr(0, comma);
    try {
      l.score = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kCorruptFile, path.string() + ":" + std::to_string(lineno) + ": bad score");
    }
    lines.push_back(std::move(l));
  }
  return lines;
}

}  // namespace aegm::scoring
