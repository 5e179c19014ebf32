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
#include <span>
#include <string>
#include <vector>

namespace aegm::audio {

inline constexpr int kExpectedSampleRate = 16000;

struct AudioClip {
  std::vector<double> samples;  // mono, approximately in [-1, 1]
  int sample_rate = kExpectedSampleRate;
  std::string clip_id;
};

// Reads a RIFF/WAVE file holding mono 16 kHz audio as 16-bit PCM or 32-bit
// IEEE float. Throws UnsupportedFormat for any other layout and CorruptFile
// for truncated or malformed chunks. clip_id is the file stem.
AudioClip LoadWav(const std::filesystem::path& path);

// Values outside [-1, 1] are clipped.
void WriteWavPcm16(const std::filesystem::path& path, std::span<const double> samples,
                   int sample_rate = kExpectedSampleRate);
void WriteWavFloat32(const std::filesystem::path& path, std::span<const double> samples,
                     int sample_rate = kExpectedSampleRate);

}  // namespace aegm::audio
