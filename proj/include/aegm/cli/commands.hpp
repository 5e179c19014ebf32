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
#include <iosfwd>
#include <string>
#include <vector>

#include "aegm/cli/run_config.hpp"
#include "aegm/data/dcase.hpp"
#include "aegm/eval/report.hpp"
#include "aegm/scoring/score_io.hpp"

namespace aegm::cli {

// Exclusive per-directory lock held through <dir>/.aegm.lock; Locked when
// another process holds it.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

// <root>/<machine>/<split>/<clip>.feat
std::filesystem::path FeaturePath(const std::filesystem::path& root, const std::string& machine,
                                  data::Split split, const std::string& clip_id);

void RunSynth(const RunConfig& cfg, const std::filesystem::path& out_dir);

struct FeatureStats {
  int written = 0;
  int skipped = 0;
};
// Extracts every clip of every configured machine. A cached file is kept
// when it is newer than its WAV and carries the current config hash.
FeatureStats RunFeatures(const RunConfig& cfg, const std::filesystem::path& data_dir,
                         const std::filesystem::path& out_dir, std::ostream& log);

// Trains one machine; returns the final checkpoint path.
std::filesystem::path RunTrain(const RunConfig& cfg, const std::filesystem::path& features_dir,
                               const std::filesystem::path& out_dir, std::ostream& log);

// `checkpoint` may be a file or a training output directory (latest epoch).
std::filesystem::path ResolveCheckpoint(const std::filesystem::path& checkpoint);

// Writes one CSV per (section, mode); returns the files written.
std::vector<std::filesystem::path> RunScore(const RunConfig& cfg,
                                            const std::filesystem::path& features_dir,
                                            const std::filesystem::path& checkpoint,
                                            const std::filesystem::path& out_dir,
                                            const std::vector<scoring::ScoreMode>& modes,
                                            std::ostream& log);

// Labels come from <data_dir>/manifest.csv when present, otherwise from the
// test file names. Writes report.csv and report.txt to out_dir.
eval::EvalReport RunEval(const RunConfig& cfg, const std::filesystem::path& scores_dir,
                         const std::filesystem::path& data_dir,
                         const std::filesystem::path& out_dir);

// clip_id,section,label,e_0..e_{k-1},z_0..z_{M-1}; one line per feature row.
void RunExportEmbeddings(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                         const std::filesystem::path& features_dir, data::Split split,
                         const std::filesystem::path& out_csv);

// Full command line; returns 0 on success, 1 on runtime failure, 2 on usage
// errors.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aegm::cli
