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
#include <string>
#include <string_view>

namespace aegm {

// 64-bit FNV-1a. Stable across platforms, used for config fingerprints.
std::uint64_t Fnv1a64(std::string_view bytes);

std::string HashToHex(std::uint64_t hash);

// Formats a double so that parsing it back yields the same value.
std::string FormatExact(double value);

}  // namespace aegm
