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
#include <vector>

#include "aegm/common/rng.hpp"
#include "aegm/data/dcase.hpp"

namespace aegm::data {

enum class AnomalyKind { kHarmonicDistortion, kTransientBursts, kSectionSwap };

std::string AnomalyKindName(AnomalyKind kind);  // harmonic_distortion | transient_bursts | section_swap
AnomalyKind ParseAnomalyKind(const std::string& name);

// Multi-section stand-in for a machine-sound corpus. Each section is a
// harmonic tone (fundamental plus two overtones, jittered) in white noise.
struct SynthSpec {
  std::string machine = "synth";
  int num_sections = 3;
  int clips_per_section_train = 60;
  int test_normal_per_section = 20;
  int test_anomaly_per_section = 20;
  double clip_seconds = 2.0;
  std::vector<double> base_freqs;  // empty: DefaultBaseFreqs(num_sections)
  double noise_snr_db = 20.0;
  AnomalyKind anomaly_kind = AnomalyKind::kHarmonicDistortion;
  std::uint64_t seed = 0;

  std::vector<double> ResolvedBaseFreqs() const;
  void Validate() const;  // BadConfig
};

// Geometric ladder starting at 300 Hz.
std::vector<double> DefaultBaseFreqs(int num_sections);

struct ManifestRow {
  std::string path;  // relative to the dataset root
  std::string machine;
  int section = 0;
  Split split = Split::kTrain;
  scoring::Label label = scoring::Label::kNormal;
  std::string anomaly_kind;  // "none" for normal clips
};

// Waveform of one normal clip following section `recipe`.
std::vector<double> SynthesizeNormal(const SynthSpec& spec, int recipe, Rng& rng);
// Waveform of one anomalous clip labeled with `section`.
std::vector<double> SynthesizeAnomaly(const SynthSpec& spec, int section, int index, Rng& rng);

// Writes <out>/<machine>/{train,test}/*.wav (16 kHz PCM16) and merges this
// machine's rows into <out>/manifest.csv. Returns this machine's rows.
std::vector<ManifestRow> SynthGenerate(const SynthSpec& spec, const std::filesystem::path& out_dir);

void WriteManifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> ReadManifest(const std::filesystem::path& path);

}  // namespace aegm::data
