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
#include <string_view>
#include <utility>
#include <vector>

namespace aegm {

// Self-describing binary container shared by feature caches and checkpoints:
//
//   magic      8 bytes ASCII
//   version    u32 little-endian
//   hdr_len    u32 little-endian, byte length of the header text
//   header     UTF-8 "key=value\n" lines, in insertion order
//   payload    little-endian float32 values to end of file
struct Container {
  std::string magic;
  std::uint32_t version = 1;
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<float> payload;

  void Set(std::string key, std::string value);
  bool Has(std::string_view key) const;
  // Throws CorruptFile when the key is absent.
  const std::string& Get(std::string_view key) const;
  long long GetInt(std::string_view key) const;
};

void WriteContainer(const std::filesystem::path& path, const Container& c);

// Reads and validates magic; payload is skipped when header_only is set.
Container ReadContainer(const std::filesystem::path& path,
                        std::string_view expected_magic,
                        bool header_only = false);

}  // namespace aegm
