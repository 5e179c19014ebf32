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

#include "aegm/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "aegm/audio/wav.hpp"
#include "aegm/common/error.hpp"

namespace aegm::data {
namespace {

constexpr double kOutputGain = 0.3;
constexpr int kNumPartials = 3;
constexpr double kPartialAmps[kNumPartials] = {1.0, 0.5, 0.25};

double Gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - Uniform01(rng);
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Jitter(Rng& rng, double center, double half_width) {
  return center + half_width * (2.0 * Uniform01(rng) - 1.0);
}

std::size_t NumSamples(const SynthSpec& spec) {
  return static_cast<std::size_t>(std::llround(spec.clip_seconds * audio::kExpectedSampleRate));
}

void AddSine(std::vector<double>& x, double freq, double amp, double phase) {
  const double w = 2.0 * std::numbers::pi * freq / audio::kExpectedSampleRate;
  for (std::size_t n = 0; n < x.size(); ++n) x[n] += amp * std::sin(w * static_cast<double>(n) + phase);
}

// Harmonic tone of `recipe` plus white noise at the configured SNR. Returns
// the fundamental used so anomalies can place partials relative to it.
double RenderNormal(const SynthSpec& spec, int recipe, Rng& rng, std::vector<double>& x) {
  const double base = spec.ResolvedBaseFreqs()[static_cast<std::size_t>(recipe)];
  const double f0 = base * Jitter(rng, 1.0, 0.005);
  double power = 0.0;
  for (int h = 0; h < kNumPartials; ++h) {
    const double amp = kPartialAmps[h] * Jitter(rng, 1.0, 0.2);
    const double phase = 2.0 * std::numbers::pi * Uniform01(rng);
    const double f = f0 * (h + 1);
    if (f >= audio::kExpectedSampleRate / 2.0) continue;
    AddSine(x, f, amp, phase);
    power += amp * amp / 2.0;
  }
  const double sigma = std::sqrt(power / std::pow(10.0, spec.noise_snr_db / 10.0));
  for (double& v : x) v += sigma * Gaussian(rng);
  return f0;
}

void ApplyGain(std::vector<double>& x) {
  for (double& v : x) v *= kOutputGain;
}

std::string ClipName(int section_number, Split split, scoring::Label label, int index) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "section_%02d_source_%s_%s_%04d.wav", section_number,
                SplitName(split).c_str(), scoring::LabelName(label).c_str(), index);
  return buf;
}

std::uint64_t ClipSeed(const SynthSpec& spec, int section, Split split, scoring::Label label, int index) {
  return DeriveSeed(spec.seed, {static_cast<std::uint64_t>(section),
                                static_cast<std::uint64_t>(split == Split::kTrain ? 0 : 1),
                                static_cast<std::uint64_t>(label == scoring::Label::kNormal ? 0 : 1),
                                static_cast<std::uint64_t>(index)});
}

}  // namespace

std::string AnomalyKindName(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::kHarmonicDistortion: return "harmonic_distortion";
    case AnomalyKind::kTransientBursts: return "transient_bursts";
    case AnomalyKind::kSectionSwap: return "section_swap";
  }
  return "harmonic_distortion";
}

AnomalyKind ParseAnomalyKind(const std::string& name) {
  if (name == "harmonic_distortion" || name == "harmonic") return AnomalyKind::kHarmonicDistortion;
  if (name == "transient_bursts" || name == "bursts") return AnomalyKind::kTransientBursts;
  if (name == "section_swap" || name == "swap") return AnomalyKind::kSectionSwap;
  throw Error(ErrorCode::kBadConfig, "unknown anomaly kind '" + name + "'");
}

std::vector<double> DefaultBaseFreqs(int num_sections) {
  std::vector<double> out;
  const double ratio =
      num_sections > 1 ? std::min(2.2, std::pow(6000.0 / 300.0, 1.0 / (num_sections - 1))) : 1.0;
  for (int s = 0; s < num_sections; ++s) out.push_back(300.0 * std::pow(ratio, s));
  return out;
}

std::vector<double> SynthSpec::ResolvedBaseFreqs() const {
  return base_freqs.empty() ? DefaultBaseFreqs(num_sections) : base_freqs;
}

void SynthSpec::Validate() const {
  if (num_sections < 1) throw Error(ErrorCode::kBadConfig, "num_sections must be >= 1");
  if (anomaly_kind == AnomalyKind::kSectionSwap && num_sections < 2)
    throw Error(ErrorCode::kBadConfig, "section_swap anomalies need at least 2 sections");
  if (clips_per_section_train < 1 || test_normal_per_section < 0 || test_anomaly_per_section < 0)
    throw Error(ErrorCode::kBadConfig, "clip counts must be non-negative (train >= 1)");
  if (!(clip_seconds > 0)) throw Error(ErrorCode::kBadConfig, "clip_seconds must be positive");
  if (machine.empty() || machine.find_first_of("/\\,") != std::string::npos)
    throw Error(ErrorCode::kBadConfig, "invalid machine name '" + machine + "'");
  const auto freqs = ResolvedBaseFreqs();
  if (static_cast<int>(freqs.size()) != num_sections)
    throw Error(ErrorCode::kBadConfig, "need one base frequency per section");
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!(freqs[i] > 0 && freqs[i] < 8000.0))
      throw Error(ErrorCode::kBadConfig, "base frequencies must lie in (0, 8000) Hz");
    for (std::size_t j = 0; j < i; ++j)
      if (freqs[i] == freqs[j]) throw Error(ErrorCode::kBadConfig, "base frequencies must be distinct");
  }
}

std::vector<double> SynthesizeNormal(const SynthSpec& spec, int recipe, Rng& rng) {
  std::vector<double> x(NumSamples(spec), 0.0);
  RenderNormal(spec, recipe, rng, x);
  ApplyGain(x);
  return x;
}

std::vector<double> SynthesizeAnomaly(const SynthSpec& spec, int section, int index, Rng& rng) {
  std::vector<double> x(NumSamples(spec), 0.0);
  switch (spec.anomaly_kind) {
    case AnomalyKind::kHarmonicDistortion: {
      const double f0 = RenderNormal(spec, section, rng, x);
      // Inharmonic partial between the first and second harmonic.
      const double f = f0 * Jitter(rng, 1.5, 0.1);
      AddSine(x, f, Jitter(rng, 0.5, 0.1), 2.0 * std::numbers::pi * Uniform01(rng));
      break;
    }
    case AnomalyKind::kTransientBursts: {
      RenderNormal(spec, section, rng, x);
      const int clicks = 3 + static_cast<int>(UniformIndex(rng, 4));
      const std::size_t len = static_cast<std::size_t>(0.005 * audio::kExpectedSampleRate);
      for (int c = 0; c < clicks; ++c) {
        const std::size_t at = static_cast<std::size_t>(UniformIndex(rng, x.size() - len));
        for (std::size_t k = 0; k < len; ++k)
          x[at + k] += 1.5 * std::exp(-static_cast<double>(k) / (len / 4.0)) * Gaussian(rng);
      }
      break;
    }
    case AnomalyKind::kSectionSwap: {
      // Sources cycle through the other sections so each is used equally.
      const int m = spec.num_sections;
      const int source = (section + 1 + index % (m - 1)) % m;
      RenderNormal(spec, source, rng, x);
      break;
    }
  }
  ApplyGain(x);
  return x;
}

std::vector<ManifestRow> SynthGenerate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  spec.Validate();
  std::error_code ec;
  for (const char* split : {"train", "test"}) {
    std::filesystem::create_directories(out_dir / spec.machine / split, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (out_dir / spec.machine / split).string());
  }

  std::vector<ManifestRow> rows;
  auto emit = [&](int section, Split split, scoring::Label label, int index,
                  const std::vector<double>& wave) {
    const std::string rel = spec.machine + "/" + SplitName(split) + "/" + ClipName(section, split, label, index);
    audio::WriteWavPcm16(out_dir / rel, wave);
    rows.push_back({rel, spec.machine, section, split, label,
                    label == scoring::Label::kNormal ? "none" : AnomalyKindName(spec.anomaly_kind)});
  };

  for (int s = 0; s < spec.num_sections; ++s) {
    for (int i = 0; i < spec.clips_per_section_train; ++i) {
      Rng rng(ClipSeed(spec, s, Split::kTrain, scoring::Label::kNormal, i));
      emit(s, Split::kTrain, scoring::Label::kNormal, i, SynthesizeNormal(spec, s, rng));
    }
    for (int i = 0; i < spec.test_normal_per_section; ++i) {
      Rng rng(ClipSeed(spec, s, Split::kTest, scoring::Label::kNormal, i));
      emit(s, Split::kTest, scoring::Label::kNormal, i, SynthesizeNormal(spec, s, rng));
    }
    for (int i = 0; i < spec.test_anomaly_per_section; ++i) {
      Rng rng(ClipSeed(spec, s, Split::kTest, scoring::Label::kAnomaly, i));
      emit(s, Split::kTest, scoring::Label::kAnomaly, i, SynthesizeAnomaly(spec, s, i, rng));
    }
  }

  const auto manifest_path = out_dir / "manifest.csv";
  std::vector<ManifestRow> merged;
  if (std::filesystem::exists(manifest_path))
    for (auto& r : ReadManifest(manifest_path))
      if (r.machine != spec.machine) merged.push_back(std::move(r));
  merged.insert(merged.end(), rows.begin(), rows.end());
  std::sort(merged.begin(), merged.end(),
            [](const ManifestRow& a, const ManifestRow& b) { return a.path < b.path; });
  WriteManifest(manifest_path, merged);
  return rows;
}

void WriteManifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << "path,machine,section,split,label,anomaly_kind\n";
  for (const auto& r : rows)
    out << r.path << ',' << r.machine << ',' << r.section << ',' << SplitName(r.split) << ','
        << scoring::LabelName(r.label) << ',' << r.anomaly_kind << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::vector<ManifestRow> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("path,machine,section,split,label,anomaly_kind", 0) != 0)
    throw Error(ErrorCode::kCorruptFile, path.string() + ": missing manifest header");
  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 6) throw Error(ErrorCode::kCorruptFile, path.string() + ": bad row '" + line + "'");
    ManifestRow r;
    r.path = f[0];
    r.machine = f[1];
    r.section = std::stoi(f[2]);
    r.split = ParseSplit(f[3]);
    r.label = scoring::ParseLabel(f[4]);
    r.anomaly_kind = f[5];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace aegm::data
