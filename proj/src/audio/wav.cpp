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

#include "aegm/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "aegm/common/error.hpp"

namespace aegm::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t U16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t U32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
void Put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}
void Put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void WriteWav(const std::filesystem::path& path, std::uint16_t format, std::uint16_t bits,
              int sample_rate, const std::string& data) {
  const std::uint16_t block_align = bits / 8;
  std::string bytes = "RIFF";
  Put32(bytes, static_cast<std::uint32_t>(36 + data.size()));
  bytes += "WAVEfmt ";
  Put32(bytes, 16);
  Put16(bytes, format);
  Put16(bytes, 1);
  Put32(bytes, static_cast<std::uint32_t>(sample_rate));
  Put32(bytes, static_cast<std::uint32_t>(sample_rate) * block_align);
  Put16(bytes, block_align);
  Put16(bytes, bits);
  bytes += "data";
  Put32(bytes, static_cast<std::uint32_t>(data.size()));
  bytes += data;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace

AudioClip LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  const std::string name = path.string();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::kUnsupportedFormat, name + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = p + pos;
    const std::uint32_t len = U32(chunk + 4);
    if (len > size - pos - 8)
      throw Error(ErrorCode::kCorruptFile, name + ": chunk extends past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw Error(ErrorCode::kCorruptFile, name + ": fmt chunk too short");
      format = U16(chunk + 8);
      channels = U16(chunk + 10);
      rate = U32(chunk + 12);
      bits = U16(chunk + 22);
      if (format == kFormatExtensible) {
        if (len < 40) throw Error(ErrorCode::kCorruptFile, name + ": extensible fmt chunk too short");
        format = U16(chunk + 32);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1u);
  }
  if (!have_fmt) throw Error(ErrorCode::kCorruptFile, name + ": missing fmt chunk");
  if (data == nullptr) throw Error(ErrorCode::kCorruptFile, name + ": missing data chunk");
  if (channels != 1)
    throw Error(ErrorCode::kUnsupportedFormat, name + ": expected mono, got " +
                                                   std::to_string(channels) + " channels");
  if (rate != static_cast<std::uint32_t>(kExpectedSampleRate))
    throw Error(ErrorCode::kUnsupportedFormat,
                name + ": expected 16000 Hz, got " + std::to_string(rate) + " Hz");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.clip_id = path.stem().string();
  if (format == kFormatPcm && bits == 16) {
    if (data_len % 2 != 0) throw Error(ErrorCode::kCorruptFile, name + ": odd PCM16 data length");
    clip.samples.resize(data_len / 2);
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
      clip.samples[i] = static_cast<std::int16_t>(U16(data + 2 * i)) / 32768.0;
  } else if (format == kFormatFloat && bits == 32) {
    if (data_len % 4 != 0) throw Error(ErrorCode::kCorruptFile, name + ": ragged float32 data length");
    clip.samples.resize(data_len / 4);
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      std::uint32_t b = U32(data + 4 * i);
      float f;
      std::memcpy(&f, &b, sizeof(f));
      clip.samples[i] = f;
    }
  } else {
    throw Error(ErrorCode::kUnsupportedFormat,
                name + ": unsupported encoding (format " + std::to_string(format) + ", " +
                    std::to_string(bits) + " bits)");
  }
  if (clip.samples.empty()) throw Error(ErrorCode::kClipTooShort, name + ": no samples");
  return clip;
}

void WriteWavPcm16(const std::filesystem::path& path, std::span<const double> samples,
                   int sample_rate) {
  std::string data;
  data.reserve(samples.size() * 2);
  for (double s : samples) {
    double v = std::round(std::clamp(s, -1.0, 1.0) * 32767.0);
    Put16(data, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  WriteWav(path, kFormatPcm, 16, sample_rate, data);
}

void WriteWavFloat32(const std::filesystem::path& path, std::span<const double> samples,
                     int sample_rate) {
  std::string data;
  data.reserve(samples.size() * 4);
  for (double s : samples) {
    float f = static_cast<float>(s);
    std::uint32_t b;
    std::memcpy(&b, &f, sizeof(b));
    Put32(data, b);
  }
  WriteWav(path, kFormatFloat, 32, sample_rate, data);
}

}  // namespace aegm::audio
