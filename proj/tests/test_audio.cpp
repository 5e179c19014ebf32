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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "aegm/audio/feature_cache.hpp"
#include "aegm/audio/features.hpp"
#include "aegm/audio/wav.hpp"
#include "aegm/common/rng.hpp"
#include "test_util.hpp"

using namespace aegm;
using namespace aegm::audio;
using aegm::testing::TempDir;

namespace {

AudioClip Sine(double hz, double seconds, double amp = 1.0) {
  AudioClip c;
  const auto n = static_cast<std::size_t>(seconds * kExpectedSampleRate);
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    c.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / kExpectedSampleRate);
  c.clip_id = "sine";
  return c;
}

AudioClip Noise(std::size_t n, std::uint64_t seed) {
  AudioClip c;
  Rng rng(seed);
  c.samples.resize(n);
  for (auto& s : c.samples) s = 2.0 * Uniform01(rng) - 1.0;
  c.clip_id = "noise";
  return c;
}

// |X_k| of one periodic-Hann frame by the O(n^2) definition.
std::vector<double> DirectDftMagnitude(const std::vector<double>& x, std::size_t start, int n) {
  std::vector<double> out(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) {
    double re = 0, im = 0;
    for (int i = 0; i < n; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
      const double v = x[start + static_cast<std::size_t>(i)] * w;
      re += v * std::cos(2.0 * std::numbers::pi * k * i / n);
      im -= v * std::sin(2.0 * std::numbers::pi * k * i / n);
    }
    out[static_cast<std::size_t>(k)] = std::hypot(re, im);
  }
  return out;
}

void Put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}
void Put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Minimal PCM16 file with arbitrary channel count and rate.
std::string PcmWav(int channels, int rate, int frames) {
  std::string data(static_cast<std::size_t>(frames * channels * 2), '\0');
  std::string s = "RIFF";
  Put32(s, static_cast<std::uint32_t>(36 + data.size()));
  s += "WAVEfmt ";
  Put32(s, 16);
  Put16(s, 1);
  Put16(s, static_cast<std::uint16_t>(channels));
  Put32(s, static_cast<std::uint32_t>(rate));
  Put32(s, static_cast<std::uint32_t>(rate * channels * 2));
  Put16(s, static_cast<std::uint16_t>(channels * 2));
  Put16(s, 16);
  s += "data";
  Put32(s, static_cast<std::uint32_t>(data.size()));
  return s + data;
}

}  // namespace

TEST_CASE("wav: ten seconds of PCM16 load as 160000 samples") {
  TempDir dir;
  AudioClip c = Sine(440.0, 10.0, 0.5);
  WriteWavPcm16(dir / "a.wav", c.samples);
  const AudioClip back = LoadWav(dir / "a.wav");
  CHECK(back.samples.size() == 160000);
  CHECK(back.sample_rate == 16000);
  CHECK(back.clip_id == "a");
  double worst = 0;
  for (std::size_t i = 0; i < c.samples.size(); ++i)
    worst = std::max(worst, std::fabs(back.samples[i] - c.samples[i]));
  CHECK(worst <= 1.0 / 32767.0);
}

TEST_CASE("wav: silent file stays exactly zero") {
  TempDir dir;
  aegm::testing::WriteBytes(dir / "z.wav", PcmWav(1, 16000, 2048));
  const AudioClip c = LoadWav(dir / "z.wav");
  CHECK(c.samples.size() == 2048);
  CHECK(std::all_of(c.samples.begin(), c.samples.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("wav: float32 round trip is exact for float-representable values") {
  TempDir dir;
  std::vector<double> x = {0.0, 0.25, -0.5, 0.125, -1.0, 0.75};
  WriteWavFloat32(dir / "f.wav", x);
  CHECK(LoadWav(dir / "f.wav").samples == x);
}

TEST_CASE("wav: rejected layouts") {
  TempDir dir;
  aegm::testing::WriteBytes(dir / "rate.wav", PcmWav(1, 8000, 100));
  CHECK_THROWS_CODE(LoadWav(dir / "rate.wav"), ErrorCode::kUnsupportedFormat);
  aegm::testing::WriteBytes(dir / "stereo.wav", PcmWav(2, 16000, 100));
  CHECK_THROWS_CODE(LoadWav(dir / "stereo.wav"), ErrorCode::kUnsupportedFormat);
  aegm::testing::WriteBytes(dir / "junk.wav", "not a wave file at all, just text");
  CHECK_THROWS_CODE(LoadWav(dir / "junk.wav"), ErrorCode::kUnsupportedFormat);
  std::string cut = PcmWav(1, 16000, 100);
  cut.resize(cut.size() - 50);
  aegm::testing::WriteBytes(dir / "cut.wav", cut);
  CHECK_THROWS_CODE(LoadWav(dir / "cut.wav"), ErrorCode::kCorruptFile);
  aegm::testing::WriteBytes(dir / "empty.wav", PcmWav(1, 16000, 0));
  CHECK_THROWS_CODE(LoadWav(dir / "empty.wav"), ErrorCode::kClipTooShort);
}

TEST_CASE("stft: 1 kHz tone peaks at bin 64 in every frame") {
  const AudioClip c = Sine(1000.0, 1.0);
  FeatureConfig cfg;
  const Tensor2 mag = StftMagnitude(c, cfg);
  REQUIRE(mag.rows() == 30);
  for (Eigen::Index t = 0; t < mag.rows(); ++t) {
    Eigen::Index arg;
    mag.row(t).maxCoeff(&arg);
    CHECK(arg == 64);
  }
  const std::vector<double> ref = DirectDftMagnitude(c.samples, 512, 1024);
  Eigen::Index ref_arg = std::max_element(ref.begin(), ref.end()) - ref.begin();
  CHECK(ref_arg == 64);
}

TEST_CASE("stft: matches the direct transform on noise") {
  const AudioClip c = Noise(4096, 5);
  FeatureConfig cfg;
  const Tensor2 mag = StftMagnitude(c, cfg);
  for (int t : {0, 3, 6}) {
    const auto ref = DirectDftMagnitude(c.samples, static_cast<std::size_t>(t) * 512, 1024);
    double worst = 0;
    for (int k = 0; k < 513; ++k) worst = std::max(worst, std::fabs(mag(t, k) - ref[static_cast<std::size_t>(k)]));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("stft: shapes, zeros, scaling, non-negativity") {
  FeatureConfig cfg;
  AudioClip zero;
  zero.samples.assign(16000, 0.0);
  const Tensor2 z = StftMagnitude(zero, cfg);
  CHECK(z.rows() == 30);
  CHECK(z.cols() == 513);
  CHECK(z.isZero(0.0));

  const AudioClip n = Noise(8000, 9);
  AudioClip scaled = n;
  for (auto& s : scaled.samples) s *= 3.5;
  const Tensor2 a = StftMagnitude(n, cfg), b = StftMagnitude(scaled, cfg);
  CHECK((a.array() >= 0).all());
  CHECK(((b - 3.5 * a).array().abs() <= 1e-9 * (1.0 + b.array().abs())).all());

  AudioClip tiny;
  tiny.samples.assign(1023, 0.1);
  CHECK_THROWS_CODE(StftMagnitude(tiny, cfg), ErrorCode::kClipTooShort);
}

TEST_CASE("stft: frame count formula over random lengths") {
  Rng rng(11);
  FeatureConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = 1024 + UniformIndex(rng, 20000);
    cfg.hop = 1 + static_cast<int>(UniformIndex(rng, 1024));
    const int expected = static_cast<int>((len - 1024) / static_cast<std::size_t>(cfg.hop)) + 1;
    CHECK(FrameCount(len, cfg) == expected);
  }
  cfg.hop = 512;
  CHECK(FrameCount(160000, cfg) == 311);
  CHECK(FrameCount(1024, cfg) == 1);
  CHECK(FrameCount(1023, cfg) == 0);
}

TEST_CASE("mel: slaney scale anchors") {
  CHECK(HzToMelSlaney(0.0) == 0.0);
  CHECK(HzToMelSlaney(1000.0) == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(HzToMelSlaney(6400.0) == doctest::Approx(42.0).epsilon(1e-12));
  for (double hz : {10.0, 440.0, 999.0, 1000.0, 3000.0, 7999.0})
    CHECK(MelToHzSlaney(HzToMelSlaney(hz)) == doctest::Approx(hz).epsilon(1e-12));
}

TEST_CASE("mel: filterbank rows are non-negative with positive area") {
  FeatureConfig cfg;
  const Tensor2 fb = MelFilterbank(cfg);
  CHECK(fb.rows() == 128);
  CHECK(fb.cols() == 513);
  CHECK((fb.array() >= 0).all());
  for (Eigen::Index i = 0; i < fb.rows(); ++i) CHECK(fb.row(i).sum() > 0);
  // Nothing above fmax.
  CHECK(fb.col(512).isZero(0.0));

  FeatureConfig bad = cfg;
  bad.fmax = 9000;
  CHECK_THROWS_CODE(MelFilterbank(bad), ErrorCode::kBadMelConfig);
  bad = cfg;
  bad.n_mels = 0;
  CHECK_THROWS_CODE(MelFilterbank(bad), ErrorCode::kBadMelConfig);
}

TEST_CASE("logmel: silence sits exactly on the log floor") {
  FeatureConfig cfg;
  AudioClip zero;
  zero.samples.assign(16000, 0.0);
  const Tensor2 lm = LogMel(zero, cfg);
  CHECK(lm.cols() == 128);
  CHECK((lm.array() == -120.0).all());
}

TEST_CASE("logmel: white noise lifts every channel above the floor") {
  FeatureConfig cfg;
  const AudioClip n = Noise(16000, 3);
  const Tensor2 lm = LogMel(n, cfg);
  CHECK((lm.array() > -120.0).all());
  // Independent route: power spectrum through the filterbank by hand.
  const Tensor2 mag = StftMagnitude(n, cfg);
  const Tensor2 fb = MelFilterbank(cfg);
  for (int t : {0, 17}) {
    for (int m = 0; m < 128; m += 9) {
      double acc = 0;
      for (int k = 0; k < 513; ++k) acc += fb(m, k) * mag(t, k) * mag(t, k);
      CHECK(lm(t, m) == doctest::Approx(10.0 * std::log10(acc + 1e-12)).epsilon(1e-12));
    }
  }
}

TEST_CASE("logmel: monotone in the power of any bin") {
  FeatureConfig cfg;
  Rng rng(4);
  Tensor2 power(1, 513);
  for (int k = 0; k < 513; ++k) power(0, k) = Uniform01(rng);
  const Tensor2 base = PowerToLogMel(power, cfg);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor2 bumped = power;
    bumped(0, static_cast<Eigen::Index>(UniformIndex(rng, 513))) += 0.5 + Uniform01(rng);
    CHECK((PowerToLogMel(bumped, cfg).array() >= base.array()).all());
  }
}

TEST_CASE("context stacking shapes") {
  Tensor2 f(5, 2);
  f << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  FeatureMatrix one = StackContext(f, 5);
  CHECK(one.rows.rows() == 1);
  CHECK(one.rows.cols() == 10);
  for (int i = 0; i < 10; ++i) CHECK(one.rows(0, i) == i + 1);

  CHECK(StackContext(f, 1).rows == f);

  Tensor2 g = Tensor2::Random(30, 128);
  FeatureMatrix s = StackContext(g, 5);
  CHECK(s.rows.rows() == 26);
  CHECK(s.rows.cols() == 640);
  CHECK(s.rows.block(7, 3 * 128, 1, 128) == g.row(10));

  CHECK_THROWS_CODE(StackContext(Tensor2::Zero(4, 2), 5), ErrorCode::kClipTooShort);
}

TEST_CASE("extract: default dimensions of both feature kinds") {
  const AudioClip c = Noise(16000, 21);
  FeatureConfig cfg;
  FeatureMatrix lm = ExtractFeatures(c, cfg, 2);
  CHECK(lm.rows.rows() == 26);
  CHECK(lm.rows.cols() == 640);
  CHECK(cfg.InputDim() == 640);
  CHECK(lm.section_id == 2);
  cfg.kind = FeatureKind::kStftMag;
  FeatureMatrix st = ExtractFeatures(c, cfg, 0);
  CHECK(st.rows.cols() == 2565);
  CHECK(cfg.PerFrameDim() == 513);

  // Deterministic.
  cfg.kind = FeatureKind::kLogMel;
  CHECK(ExtractFeatures(c, cfg, 2).rows == lm.rows);

  AudioClip bad = c;
  bad.samples[5000] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_CODE(ExtractFeatures(bad, cfg, 0), ErrorCode::kNonFinite);
}

TEST_CASE("shuffle: identity cases") {
  Rng rng(1);
  Tensor2 rows = Tensor2::Random(40, 64 * 5);
  const Tensor2 orig = rows;
  ShuffleLowFreq(rows, 64, 5, {32, 0.0}, rng);
  CHECK(rows == orig);
  ShuffleLowFreq(rows, 64, 5, {0, 1.0}, rng);
  CHECK(rows == orig);
  std::vector<int> ident = {0, 1, 2, 3, 4};
  std::vector<double> r(orig.row(0).data(), orig.row(0).data() + 320);
  PermuteLowFreq(r, 64, 5, 32, ident);
  CHECK(std::equal(r.begin(), r.end(), orig.row(0).data()));
}

TEST_CASE("shuffle: swapping two slots moves only the low bin") {
  // Row [[a0,a1],[b0,b1]] laid out slot-major.
  std::vector<double> row = {1.0, 2.0, 3.0, 4.0};
  const std::vector<int> swap = {1, 0};
  PermuteLowFreq(row, 2, 2, 1, swap);
  CHECK(row == std::vector<double>{3.0, 2.0, 1.0, 4.0});
}

TEST_CASE("shuffle: per-bin multisets preserved, high bins untouched") {
  Rng rng(77);
  const int f = 40, p = 5, b = 12;
  Tensor2 rows(60, f * p);
  for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = Uniform01(rng);
  const Tensor2 orig = rows;
  ShuffleLowFreq(rows, f, p, {b, 0.5}, rng);
  int changed = 0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    changed += rows.row(r) != orig.row(r);
    for (int k = 0; k < f; ++k) {
      std::vector<double> before, after;
      for (int t = 0; t < p; ++t) {
        before.push_back(orig(r, t * f + k));
        after.push_back(rows(r, t * f + k));
      }
      if (k >= b) {
        CHECK(before == after);
      } else {
        std::sort(before.begin(), before.end());
        std::sort(after.begin(), after.end());
        CHECK(before == after);
      }
    }
  }
  CHECK(changed > 10);
  CHECK(changed < 55);

  Rng a(5), c(5);
  Tensor2 x = orig, y = orig;
  ShuffleLowFreq(x, f, p, {b, 0.5}, a);
  ShuffleLowFreq(y, f, p, {b, 0.5}, c);
  CHECK(x == y);
}

TEST_CASE("feature cache: round trip and config hash guard") {
  TempDir dir;
  FeatureConfig cfg;
  FeatureMatrix fm = ExtractFeatures(Noise(16000, 8), cfg, 1);
  fm.clip_id = "section_01_source_test_normal_0003";
  const auto path = dir / "x.feat";
  WriteFeatureFile(path, fm, cfg);

  FeatureFileHeader h;
  const FeatureMatrix back = ReadFeatureFile(path, cfg.Hash(), &h);
  CHECK(h.clip_id == fm.clip_id);
  CHECK(h.section_id == 1);
  CHECK(h.rows == 26);
  CHECK(h.dim == 640);
  CHECK(h.kind == FeatureKind::kLogMel);
  CHECK(h.config_hash == cfg.Hash());
  CHECK(back.clip_id == fm.clip_id);
  CHECK(back.section_id == 1);
  const Tensor2 expected = fm.rows.cast<float>().cast<double>();
  CHECK(back.rows == expected);

  std::string bytes = aegm::testing::ReadBytes(path);
  CHECK(bytes.substr(0, 8) == "AEGMFEAT");

  FeatureConfig other = cfg;
  other.n_mels = 64;
  CHECK(other.Hash() != cfg.Hash());
  CHECK_THROWS_CODE(ReadFeatureFile(path, other.Hash()), ErrorCode::kConfigHashMismatch);

  bytes.resize(bytes.size() - 3);
  aegm::testing::WriteBytes(dir / "cut.feat", bytes);
  CHECK_THROWS_CODE(ReadFeatureFile(dir / "cut.feat"), ErrorCode::kCorruptFile);
}
