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

#include "aegm/audio/features.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "aegm/common/error.hpp"
#include "aegm/common/hash.hpp"

namespace aegm::audio {

std::string FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kLogMel ? "logmel" : "stft";
}

FeatureKind ParseFeatureKind(const std::string& name) {
  if (name == "logmel" || name == "log-mel") return FeatureKind::kLogMel;
  if (name == "stft") return FeatureKind::kStftMag;
  throw Error(ErrorCode::kBadConfig, "unknown feature kind '" + name + "' (logmel|stft)");
}

void FeatureConfig::Validate() const {
  if (sample_rate <= 0) throw Error(ErrorCode::kBadConfig, "sample_rate must be positive");
  if (n_fft < 2) throw Error(ErrorCode::kBadConfig, "n_fft must be at least 2");
  if (hop <= 0 || hop > n_fft) throw Error(ErrorCode::kBadConfig, "hop must satisfy 0 < hop <= n_fft");
  if (context_frames < 1) throw Error(ErrorCode::kBadConfig, "context_frames must be >= 1");
  if (!(log_floor_epsilon > 0)) throw Error(ErrorCode::kBadConfig, "log_floor_epsilon must be > 0");
  if (kind == FeatureKind::kLogMel) {
    if (n_mels < 1) throw Error(ErrorCode::kBadMelConfig, "n_mels must be >= 1");
    if (fmax > sample_rate / 2.0)
      throw Error(ErrorCode::kBadMelConfig, "fmax exceeds the Nyquist frequency");
    if (fmin < 0 || fmin >= fmax) throw Error(ErrorCode::kBadMelConfig, "need 0 <= fmin < fmax");
  }
}

std::string FeatureConfig::Canonical() const {
  std::string s = "kind=" + FeatureKindName(kind);
  s += ";sr=" + std::to_string(sample_rate);
  s += ";n_fft=" + std::to_string(n_fft);
  s += ";hop=" + std::to_string(hop);
  s += ";context=" + std::to_string(context_frames);
  if (kind == FeatureKind::kLogMel) {
    s += ";n_mels=" + std::to_string(n_mels);
    s += ";eps=" + FormatExact(log_floor_epsilon);
    s += ";fmin=" + FormatExact(fmin);
    s += ";fmax=" + FormatExact(fmax);
  }
  return s;
}

std::uint64_t FeatureConfig::Hash() const { return Fnv1a64(Canonical()); }

int FrameCount(std::size_t num_samples, const FeatureConfig& cfg) {
  if (num_samples < static_cast<std::size_t>(cfg.n_fft)) return 0;
  return static_cast<int>((num_samples - cfg.n_fft) / cfg.hop) + 1;
}

Tensor2 StftMagnitude(const AudioClip& clip, const FeatureConfig& cfg) {
  cfg.Validate();
  const int frames = FrameCount(clip.samples.size(), cfg);
  if (frames < 1)
    throw Error(ErrorCode::kClipTooShort, "clip '" + clip.clip_id + "' has " +
                                              std::to_string(clip.samples.size()) +
                                              " samples, fewer than n_fft");
  const int n = cfg.n_fft;
  const int bins = cfg.NumBins();

  // Periodic Hann.
  std::vector<double> window(n);
  for (int i = 0; i < n; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);

  Eigen::FFT<double> fft;
  std::vector<double> frame(n);
  std::vector<std::complex<double>> spectrum;
  Tensor2 out(frames, bins);
  for (int t = 0; t < frames; ++t) {
    const double* src = clip.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
    for (int i = 0; i < n; ++i) frame[i] = src[i] * window[i];
    fft.fwd(spectrum, frame);
    for (int k = 0; k < bins; ++k) out(t, k) = std::abs(spectrum[k]);
  }
  return out;
}

double HzToMelSlaney(double hz) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (hz < min_log_hz) return hz / f_sp;
  return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double MelToHzSlaney(double mel) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (mel < min_log_mel) return mel * f_sp;
  return min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

Tensor2 MelFilterbank(const FeatureConfig& cfg) {
  if (cfg.n_mels < 1) throw Error(ErrorCode::kBadMelConfig, "n_mels must be >= 1");
  if (cfg.fmax > cfg.sample_rate / 2.0)
    throw Error(ErrorCode::kBadMelConfig, "fmax exceeds the Nyquist frequency");
  if (cfg.fmin < 0 || cfg.fmin >= cfg.fmax)
    throw Error(ErrorCode::kBadMelConfig, "need 0 <= fmin < fmax");

  const int bins = cfg.NumBins();
  const int m = cfg.n_mels;
  const double mel_lo = HzToMelSlaney(cfg.fmin);
  const double mel_hi = HzToMelSlaney(cfg.fmax);
  std::vector<double> edges(m + 2);
  for (int i = 0; i < m + 2; ++i)
    edges[i] = MelToHzSlaney(mel_lo + (mel_hi - mel_lo) * i / (m + 1));

  Tensor2 fb = Tensor2::Zero(m, bins);
  for (int i = 0; i < m; ++i) {
    const double left = edges[i], center = edges[i + 1], right = edges[i + 2];
    const double norm = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      fb(i, k) = std::max(0.0, std::min(rise, fall)) * norm;
    }
  }
  return fb;
}

Tensor2 PowerToLogMel(const Tensor2& power, const FeatureConfig& cfg) {
  const Tensor2 fb = MelFilterbank(cfg);
  if (power.cols() != fb.cols())
    throw Error(ErrorCode::kShapeMismatch, "power spectrum width does not match filterbank");
  Tensor2 mel = power * fb.transpose();
  return (10.0 * (mel.array() + cfg.log_floor_epsilon).log10()).matrix();
}

Tensor2 LogMel(const AudioClip& clip, const FeatureConfig& cfg) {
  const Tensor2 mag = StftMagnitude(clip, cfg);
  return PowerToLogMel(mag.array().square().matrix(), cfg);
}

FeatureMatrix StackContext(const Tensor2& frames, int context_frames) {
  if (context_frames < 1) throw Error(ErrorCode::kBadConfig, "context_frames must be >= 1");
  const Eigen::Index t = frames.rows();
  if (t < context_frames)
    throw Error(ErrorCode::kClipTooShort, std::to_string(t) + " frames cannot fill " +
                                              std::to_string(context_frames) + " context slots");
  const Eigen::Index f = frames.cols();
  FeatureMatrix out;
  out.rows.resize(t - context_frames + 1, f * context_frames);
  for (Eigen::Index r = 0; r < out.rows.rows(); ++r)
    for (int p = 0; p < context_frames; ++p)
      out.rows.block(r, p * f, 1, f) = frames.row(r + p);
  return out;
}

FeatureMatrix ExtractFeatures(const AudioClip& clip, const FeatureConfig& cfg, int section_id) {
  const Tensor2 frames =
      cfg.kind == FeatureKind::kLogMel ? LogMel(clip, cfg) : StftMagnitude(clip, cfg);
  FeatureMatrix fm = StackContext(frames, cfg.context_frames);
  if (!fm.rows.allFinite())
    throw Error(ErrorCode::kNonFinite, "non-finite feature value in clip '" + clip.clip_id + "'");
  fm.clip_id = clip.clip_id;
  fm.section_id = section_id;
  return fm;
}

void PermuteLowFreq(std::span<double> row, int per_frame_dim, int context_frames, int low_bins,
                    std::span<const int> perm) {
  if (static_cast<long>(row.size()) != static_cast<long>(per_frame_dim) * context_frames)
    throw Error(ErrorCode::kShapeMismatch, "row length != per_frame_dim * context_frames");
  if (low_bins < 0 || low_bins > per_frame_dim)
    throw Error(ErrorCode::kBadConfig, "low_bins must be within [0, per_frame_dim]");
  if (static_cast<int>(perm.size()) != context_frames)
    throw Error(ErrorCode::kShapeMismatch, "permutation length != context_frames");
  if (low_bins == 0) return;
  std::vector<double> saved(row.begin(), row.end());
  for (int t = 0; t < context_frames; ++t) {
    const int src = perm[t];
    for (int b = 0; b < low_bins; ++b)
      row[t * per_frame_dim + b] = saved[src * per_frame_dim + b];
  }
}

void ShuffleLowFreq(Tensor2& rows, int per_frame_dim, int context_frames,
                    const ShuffleConfig& cfg, Rng& rng) {
  if (cfg.probability < 0 || cfg.probability > 1)
    throw Error(ErrorCode::kBadConfig, "shuffle probability must be in [0, 1]");
  if (cfg.low_bins < 0 || cfg.low_bins > per_frame_dim)
    throw Error(ErrorCode::kBadConfig, "shuffle low_bins must be within [0, per_frame_dim]");
  if (rows.cols() != static_cast<Eigen::Index>(per_frame_dim) * context_frames)
    throw Error(ErrorCode::kShapeMismatch, "rows do not match per_frame_dim * context_frames");
  if (cfg.low_bins == 0 || cfg.probability == 0) return;
  std::vector<int> perm(context_frames);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    if (Uniform01(rng) >= cfg.probability) continue;
    std::iota(perm.begin(), perm.end(), 0);
    FisherYates(perm, rng);
    PermuteLowFreq(std::span<double>(rows.row(r).data(), static_cast<std::size_t>(rows.cols())),
                   per_frame_dim, context_frames, cfg.low_bins, perm);
  }
}

}  // namespace aegm::audio
