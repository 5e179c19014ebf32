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

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>

#include "aegm/audio/features.hpp"
#include "aegm/cli/commands.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using aegm::testing::ReadBytes;
using aegm::testing::TempDir;

namespace {

// Small corpus and model so that the whole pipeline takes a few seconds.
const std::string kSmall =
    " --synth-train-clips 4 --synth-test-normal 3 --synth-test-anomaly 3 --synth-seconds 0.5"
    " --encoder-layers 16,16 --batch-size 16 --epochs 2";

struct Result {
  int code = -1;
  std::string output;
};

Result Tool(const TempDir& dir, const std::string& args, const std::string& env = "") {
  const fs::path log = dir / "tool_output.txt";
  const std::string cmd = "cd '" + dir.path().string() + "' && " + env + (env.empty() ? "" : " ") +
                          "'" + AEGM_TOOL_PATH + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = ReadBytes(log);
  return r;
}

#define REQUIRE_OK(res)                       \
  do {                                        \
    const Result r_ = (res);                  \
    INFO(r_.output);                          \
    REQUIRE(r_.code == 0);                    \
  } while (0)

std::map<std::string, std::string> TreeBytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != ".aegm.lock" &&
        e.path().filename() != "run_config.resolved")  // records absolute paths
      out[fs::relative(e.path(), root).string()] = ReadBytes(e.path());
  return out;
}

int CountLines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

std::string FirstLine(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  TempDir dir;
  CHECK(Tool(dir, "synth").code == 2);
  CHECK(Tool(dir, "nosuchcommand").code == 2);
  CHECK(Tool(dir, "synth --out x --epochs notanumber").code == 2);
  CHECK(Tool(dir, "synth --out x --bogus-key 3").code == 2);
  CHECK(Tool(dir, "train --features f --out r --classifier true --group-decoders false").code == 2);
  CHECK(Tool(dir, "--help").code == 0);
  CHECK(Tool(dir, "").code == 2);
}

TEST_CASE("config file and environment precedence") {
  TempDir dir;
  aegm::testing::WriteBytes(dir / "run.cfg", "# test\nsynth_train_clips=2\nsynth_test_normal=1\nseed=9\n");
  REQUIRE_OK(Tool(dir, "synth --out d --config run.cfg --synth-test-anomaly 1 --synth-seconds 0.25 --seed 4",
                  "AEGM_SYNTH_TEST_NORMAL=2 AEGM_SYNTH_SECTIONS=2"));
  const std::string resolved = ReadBytes(dir / "d/run_config.resolved");
  CHECK(resolved.find("synth_train_clips=2  # file") != std::string::npos);
  CHECK(resolved.find("synth_test_normal=2  # env") != std::string::npos);
  CHECK(resolved.find("seed=4  # flag") != std::string::npos);
  CHECK(resolved.find("synth_sections=2  # env") != std::string::npos);
  CHECK(resolved.find("n_mels=128  # default") != std::string::npos);
  // 2 sections x (2 train + 2 normal + 1 anomaly) + header
  CHECK(CountLines(dir / "d/manifest.csv") == 11);

  aegm::testing::WriteBytes(dir / "bad.cfg", "no_such_key=1\n");
  CHECK(Tool(dir, "synth --out e --config bad.cfg").code == 2);
}

TEST_CASE("synth is deterministic") {
  TempDir dir;
  REQUIRE_OK(Tool(dir, "synth --out a" + kSmall));
  REQUIRE_OK(Tool(dir, "synth --out b" + kSmall));
  REQUIRE_OK(Tool(dir, "synth --out c --seed 1" + kSmall));
  const auto a = TreeBytes(dir / "a");
  CHECK(a.size() == 3 * 10 + 1);
  CHECK(a == TreeBytes(dir / "b"));
  CHECK(a != TreeBytes(dir / "c"));
}

TEST_CASE("features are cached and invalidated by config changes") {
  TempDir dir;
  REQUIRE_OK(Tool(dir, "synth --out d" + kSmall));
  Result r = Tool(dir, "features --data d --out f" + kSmall);
  REQUIRE(r.code == 0);
  CHECK(r.output.find("30 written, 0 up to date") != std::string::npos);
  r = Tool(dir, "features --data d --out f" + kSmall);
  CHECK(r.output.find("0 written, 30 up to date") != std::string::npos);
  r = Tool(dir, "features --data d --out f --n-mels 64" + kSmall);
  CHECK(r.output.find("30 written, 0 up to date") != std::string::npos);
  // training with the stale setting names the fix
  r = Tool(dir, "train --features f --out run" + kSmall);
  CHECK(r.code == 1);
  CHECK(r.output.find("aegm features") != std::string::npos);
}

TEST_CASE("pipeline end to end") {
  TempDir dir;
  REQUIRE_OK(Tool(dir, "synth --out d" + kSmall));
  REQUIRE_OK(Tool(dir, "features --data d --out f" + kSmall));
  REQUIRE_OK(Tool(dir, "train --features f --out run --checkpoint-every 1" + kSmall));
  CHECK(fs::exists(dir / "run/ckpt_epoch_1.aegm"));
  CHECK(fs::exists(dir / "run/ckpt_epoch_2.aegm"));
  CHECK(fs::exists(dir / "run/run_config.resolved"));
  CHECK(CountLines(dir / "run/train_log.csv") == 3);

  REQUIRE_OK(Tool(dir, "score --features f --checkpoint run --out s" + kSmall));
  for (const char* mode : {"gae", "ac", "ens"})
    for (const char* sec : {"00", "01", "02"}) {
      const fs::path p = dir / ("s/anomaly_score_synth_section_" + std::string(sec) + "_" + mode + ".csv");
      REQUIRE(fs::exists(p));
      CHECK(CountLines(p) == 6);
    }
  REQUIRE_OK(Tool(dir, "eval --scores s --data d" + kSmall));
  // 9 section rows, 3 machine means, 3 overall means, header
  CHECK(CountLines(dir / "s/report.csv") == 16);
  CHECK(ReadBytes(dir / "s/report.txt").find("Average") != std::string::npos);

  REQUIRE_OK(Tool(dir, "score --features f --checkpoint run/ckpt_epoch_1.aegm --out s1 --mode ac" + kSmall));
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir / "s1")) files += e.path().extension() == ".csv";
  CHECK(files == 3);

  CHECK(Tool(dir, "score --features f --checkpoint nowhere --out s2" + kSmall).code == 1);
}

TEST_CASE("eval refuses clips it cannot label") {
  TempDir dir;
  REQUIRE_OK(Tool(dir, "synth --out d" + kSmall));
  REQUIRE_OK(Tool(dir, "features --data d --out f" + kSmall));
  REQUIRE_OK(Tool(dir, "train --features f --out run --epochs 1" + kSmall));
  REQUIRE_OK(Tool(dir, "score --features f --checkpoint run --out s --mode gae" + kSmall));
  std::ofstream(dir / "s/anomaly_score_synth_section_00_gae.csv", std::ios::app) << "mystery_clip.wav,0.5\n";
  const Result r = Tool(dir, "eval --scores s --data d" + kSmall);
  CHECK(r.code == 1);
  CHECK(r.output.find("mystery_clip") != std::string::npos);
}

TEST_CASE("plain autoencoder scores only reconstruction") {
  TempDir dir;
  REQUIRE_OK(Tool(dir, "synth --out d" + kSmall));
  REQUIRE_OK(Tool(dir, "features --data d --out f" + kSmall));
  REQUIRE_OK(Tool(dir, "train --features f --out run --classifier false --group-decoders false" + kSmall));
  REQUIRE_OK(Tool(dir, "score --features f --checkpoint run --out s" + kSmall));
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir / "s"))
    if (e.path().extension() == ".csv") {
      ++files;
      CHECK(e.path().stem().string().ends_with("_gae"));
    }
  CHECK(files == 3);
  CHECK(Tool(dir, "score --features f --checkpoint run --out s2 --mode ac" + kSmall).code == 1);
  REQUIRE_OK(Tool(dir, "eval --scores s --data d" + kSmall));
}

TEST_CASE("embedding export") {
  TempDir dir;
  REQUIRE_OK(Tool(dir, "synth --out d" + kSmall));
  REQUIRE_OK(Tool(dir, "features --data d --out f" + kSmall));
  REQUIRE_OK(Tool(dir, "train --features f --out run" + kSmall));
  REQUIRE_OK(Tool(dir, "export-embeddings --checkpoint run --features f --out e/emb.csv" + kSmall));
  REQUIRE_OK(Tool(dir, "export-embeddings --checkpoint run --features f --out e/emb2.csv" + kSmall));
  CHECK(ReadBytes(dir / "e/emb.csv") == ReadBytes(dir / "e/emb2.csv"));
  CHECK(fs::exists(dir / "e/emb.csv.run_config.resolved"));

  aegm::audio::FeatureConfig fc;
  const int rows_per_clip = aegm::audio::FrameCount(8000, fc) - (fc.context_frames - 1);
  CHECK(CountLines(dir / "e/emb.csv") == 1 + 18 * rows_per_clip);
  std::string header = FirstLine(dir / "e/emb.csv");
  CHECK(header.rfind("clip_id,section,label,e_0,", 0) == 0);
  CHECK(header.find("e_7,z_0,z_1,z_2") != std::string::npos);
  CHECK(header.find("e_8") == std::string::npos);
  CHECK(header.find("z_3") == std::string::npos);

  REQUIRE_OK(Tool(dir, "export-embeddings --checkpoint run --features f --split train --out e/tr.csv" + kSmall));
  CHECK(CountLines(dir / "e/tr.csv") == 1 + 12 * rows_per_clip);
}

TEST_CASE("a held output directory is refused") {
  TempDir dir;
  fs::create_directories(dir / "d");
  {
    aegm::cli::DirLock held(dir / "d");
    const Result r = Tool(dir, "synth --out d" + kSmall);
    CHECK(r.code == 1);
    CHECK(r.output.find("ock") != std::string::npos);
  }
  REQUIRE_OK(Tool(dir, "synth --out d" + kSmall));
}
