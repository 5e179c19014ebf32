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

#include "aegm/data/dcase.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "aegm/common/error.hpp"

namespace aegm::data {
namespace {

std::vector<std::string> Tokens(const std::string& stem) {
  std::vector<std::string> out;
  std::stringstream ss(stem);
  std::string tok;
  while (std::getline(ss, tok, '_')) out.push_back(tok);
  return out;
}

bool AllDigits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::string SplitName(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kBadConfig, "unknown split '" + name + "'");
}

ParsedClipName ParseClipName(const std::string& file_name) {
  const std::string stem = std::filesystem::path(file_name).stem().string();
  const auto tokens = Tokens(stem);
  ParsedClipName out;
  bool have_section = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "section") {
      if (i + 1 >= tokens.size() || !AllDigits(tokens[i + 1]))
        throw Error(ErrorCode::kNameParseError, file_name + ": 'section' not followed by a number");
      if (have_section) throw Error(ErrorCode::kNameParseError, file_name + ": repeated section token");
      out.section_number = std::stoi(tokens[i + 1]);
      have_section = true;
    } else if (tokens[i] == "normal" || tokens[i] == "anomaly") {
      const auto label = tokens[i] == "normal" ? scoring::Label::kNormal : scoring::Label::kAnomaly;
      if (out.label && *out.label != label)
        throw Error(ErrorCode::kNameParseError, file_name + ": both normal and anomaly tokens");
      out.label = label;
    }
  }
  if (!have_section) throw Error(ErrorCode::kNameParseError, file_name + ": no section_NN token");
  return out;
}

std::vector<ClipMeta> ScanDcase(const std::filesystem::path& root, const std::string& machine,
                                const ScanOptions& options) {
  std::vector<ClipMeta> clips;
  for (Split split : {Split::kTrain, Split::kTest}) {
    const auto dir = root / machine / SplitName(split);
    if (!std::filesystem::is_directory(dir))
      throw Error(ErrorCode::kLayoutError, "missing directory " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext == ".wav") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const ParsedClipName parsed = ParseClipName(f.filename().string());
      ClipMeta meta;
      meta.path = f;
      meta.machine = machine;
      meta.section_number = parsed.section_number;
      meta.split = split;
      if (parsed.label) {
        meta.label = *parsed.label;
      } else if (split == Split::kTest && options.allow_unlabeled_test) {
        meta.label = scoring::Label::kUnknown;
      } else {
        throw Error(ErrorCode::kNameParseError, f.filename().string() + ": no normal/anomaly token");
      }
      if (split == Split::kTrain && meta.label != scoring::Label::kNormal)
        throw Error(ErrorCode::kNameParseError,
                    f.filename().string() + ": training data must be normal");
      clips.push_back(std::move(meta));
    }
  }
  const auto numbers = SectionNumbers(clips);
  for (auto& c : clips)
    c.section_id = static_cast<int>(std::lower_bound(numbers.begin(), numbers.end(), c.section_number) -
                                    numbers.begin());
  return clips;
}

std::vector<int> SectionNumbers(const std::vector<ClipMeta>& clips) {
  std::set<int> s;
  for (const auto& c : clips) s.insert(c.section_number);
  return {s.begin(), s.end()};
}

}  // namespace aegm::data
