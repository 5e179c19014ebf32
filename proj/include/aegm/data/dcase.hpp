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
#include <optional>
#include <string>
#include <vector>

#include "aegm/scoring/scoring.hpp"

namespace aegm::data {

enum class Split { kTrain, kTest };

std::string SplitName(Split split);
Split ParseSplit(const std::string& name);

struct ClipMeta {
  std::filesystem::path path;
  std::string machine;
  int section_id = 0;      // dense index 0..M-1 in ascending section-number order
  int section_number = 0;  // NN from "section_NN"
  Split split = Split::kTrain;
  scoring::Label label = scoring::Label::kUnknown;

  std::string clip_id() const { return path.stem().string(); }
};

struct ParsedClipName {
  int section_number = 0;
  std::optional<scoring::Label> label;
};

// Extracts "section_NN" and a "normal"/"anomaly" token from a file name.
// NameParseError when the section token is missing or malformed.
ParsedClipName ParseClipName(const std::string& file_name);

struct ScanOptions {
  // Accept test files without a label token (label Unknown).
  bool allow_unlabeled_test = false;
};

// Lists <root>/<machine>/{train,test}/*.wav, train first, each split in
// file-name order. LayoutError when a split directory is missing,
// NameParseError for unparseable names or anomalous training files.
std::vector<ClipMeta> ScanDcase(const std::filesystem::path& root, const std::string& machine,
                                const ScanOptions& options = {});

// Distinct section numbers in ascending order; index i is decoder i.
std::vector<int> SectionNumbers(const std::vector<ClipMeta>& clips);

}  // namespace aegm::data
