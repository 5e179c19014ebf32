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
#include <span>
#include <string>

#include "aegm/audio/wav.hpp"
#include "aegm/common/rng.hpp"
#include "aegm/common/tensor.hpp"

namespace aegm::audio {

enum class FeatureKind { kLogMel, kStftMag };

std::string FeatureKindName(FeatureKind kind);
// Accepts "logmel" / "stft"; throws BadConfig otherwise.
FeatureKind ParseFeatureKind(const std::string& name);

struct FeatureConfig {
  FeatureKind kind = FeatureKind::kLogMel;
  int sample_rate = kExpectedSampleRate;
  int n_fft = 1024;  // 64 ms at 16 kHz
  int hop = 512;
  int n_mels = 128;
  int context_frames = 5;
  double log_floor_epsilon = 1e-12;
  double fmin = 0.0;
  double fmax = 8000.0;

  int NumBins() const { return n_fft / 2 + 1; }
  int PerFrameDim() const { return kind == FeatureKind::kLogMel ? n_mels : NumBins(); }
  int InputDim() const { return PerFrameDim() * context_frames; }

  // Throws BadConfig / BadMelConfig.
  void Validate() const;
  // Canonical key=value rendering; the hash of this string fingerprints
  // every downstream artifact.
  std::string Canonical() const;
  std::uint64_t Hash() const;
};

// One clip's model input: each row is P stacked context frames.
struct FeatureMatrix {
  Tensor2 rows;
  std::string clip_id;
  int section_id = 0;
};

int FrameCount(std::size_t num_samples, const FeatureConfig& cfg);

// Hann-windowed |DFT| per frame, T x (n_fft/2 + 1). No centering or padding.
Tensor2 StftMagnitude(const AudioClip& clip, const FeatureConfig& cfg);

// Slaney-style triangular filters with area normalization, n_mels x bins.
Tensor2 MelFilterbank(const FeatureConfig& cfg);

double HzToMelSlaney(double hz);
double MelToHzSlaney(double mel);

// 10 log10(mel_power + eps) from a T x bins power spectrogram.
Tensor2 PowerToLogMel(const Tensor2& power, const FeatureConfig& cfg);

Tensor2 LogMel(const AudioClip& clip, const FeatureConfig& cfg);

// Row t' is frames t'..t'+P-1 concatenated; T-P+1 rows of F*P values.
FeatureMatrix StackContext(const Tensor2& frames, int context_frames);

// Frame features of the configured kind, stacked; throws NonFinite when any
// value is NaN or infinite.
FeatureMatrix ExtractFeatures(const AudioClip& clip, const FeatureConfig& cfg, int section_id);

struct ShuffleConfig {
  int low_bins = 32;
  double probability = 0.5;
};

// Moves the lowest `low_bins` coefficients of context slot perm[t] into slot
// t, for every slot t. Bins at or above low_bins are untouched.
void PermuteLowFreq(std::span<double> row, int per_frame_dim, int context_frames, int low_bins,
                    std::span<const int> perm);

// Training-time augmentation: each row is selected with the configured
// probability and gets a uniformly random slot permutation.
void ShuffleLowFreq(Tensor2& rows, int per_frame_dim, int context_frames,
                    const ShuffleConfig& cfg, Rng& rng);

}  // namespace aegm::audio
