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

#include "aegm/common/error.hpp"

namespace aegm {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kClipTooShort: return "ClipTooShort";
    case ErrorCode::kBadMelConfig: return "BadMelConfig";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNoForwardCache: return "NoForwardCache";
    case ErrorCode::kBadTarget: return "BadTarget";
    case ErrorCode::kBadSection: return "BadSection";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kMissingSection: return "MissingSection";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kOneClassOnly: return "OneClassOnly";
    case ErrorCode::kBadP: return "BadP";
    case ErrorCode::kLayoutError: return "LayoutError";
    case ErrorCode::kNameParseError: return "NameParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigHashMismatch: return "ConfigHashMismatch";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kUnknownClip: return "UnknownClip";
    case ErrorCode::kLocked: return "Locked";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace aegm
