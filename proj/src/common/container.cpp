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

#include "aegm/common/container.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "aegm/common/error.hpp"

namespace aegm {
namespace {

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void Container::Set(std::string key, std::string value) {
  for (auto& kv : header) {
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  }
  header.emplace_back(std::move(key), std::move(value));
}

bool Container::Has(std::string_view key) const {
  for (const auto& kv : header)
    if (kv.first == key) return true;
  return false;
}

const std::string& Container::Get(std::string_view key) const {
  for (const auto& kv : header)
    if (kv.first == key) return kv.second;
  throw Error(ErrorCode::kCorruptFile, "container header lacks key '" + std::string(key) + "'");
}

long long Container::GetInt(std::string_view key) const {
  const std::string& v = Get(key);
  try {
    std::size_t pos = 0;
    long long out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kCorruptFile,
                "header key '" + std::string(key) + "' is not an integer: " + v);
  }
}

void WriteContainer(const std::filesystem::path& path, const Container& c) {
  if (c.magic.size() != 8) throw Error(ErrorCode::kIoError, "container magic must be 8 bytes");
  std::string text;
  for (const auto& [k, v] : c.header) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw Error(ErrorCode::kIoError, "invalid header entry '" + k + "'");
    text += k;
    text += '=';
    text += v;
    text += '\n';
  }
  std::string bytes = c.magic;
  PutU32(bytes, c.version);
  PutU32(bytes, static_cast<std::uint32_t>(text.size()));
  bytes += text;
  bytes.reserve(bytes.size() + 4 * c.payload.size());
  for (float f : c.payload) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    PutU32(bytes, bits);
  }

  // Write-then-rename so readers never observe a partial file.
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot rename to " + path.string() + ": " + ec.message());
}

Container ReadContainer(const std::filesystem::path& path, std::string_view expected_magic,
                        bool header_only) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  unsigned char prefix[16];
  in.read(reinterpret_cast<char*>(prefix), sizeof(prefix));
  if (in.gcount() != sizeof(prefix))
    throw Error(ErrorCode::kCorruptFile, path.string() + ": truncated container prefix");
  Container c;
  c.magic.assign(reinterpret_cast<const char*>(prefix), 8);
  if (c.magic != expected_magic)
    throw Error(ErrorCode::kCorruptFile,
                path.string() + ": bad magic (expected " + std::string(expected_magic) + ")");
  c.version = GetU32(prefix + 8);
  const std::uint32_t hdr_len = GetU32(prefix + 12);
  std::string text(hdr_len, '\0');
  in.read(text.data(), hdr_len);
  if (static_cast<std::uint32_t>(in.gcount()) != hdr_len)
    throw Error(ErrorCode::kCorruptFile, path.string() + ": truncated header");
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kCorruptFile, path.string() + ": malformed header line");
    c.header.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  if (header_only) return c;

  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (rest.size() % 4 != 0)
    throw Error(ErrorCode::kCorruptFile, path.string() + ": payload is not a whole number of float32");
  c.payload.resize(rest.size() / 4);
  const auto* p = reinterpret_cast<const unsigned char*>(rest.data());
  for (std::size_t i = 0; i < c.payload.size(); ++i) {
    std::uint32_t bits = GetU32(p + 4 * i);
    std::memcpy(&c.payload[i], &bits, sizeof(bits));
  }
  return c;
}

}  // namespace aegm
