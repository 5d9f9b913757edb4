// Copyright 2026 The ofar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ofar/error.h"

namespace ofar {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroRow: return "ZeroRow";
    case ErrorCode::kTooLong: return "TooLong";
    case ErrorCode::kEmpty: return "Empty";
    case ErrorCode::kEmptyItem: return "EmptyItem";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kBatchTooSmall: return "BatchTooSmall";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptLength: return "CorruptLength";
    case ErrorCode::kDuplicateInRanking: return "DuplicateInRanking";
    case ErrorCode::kEmptyRelevant: return "EmptyRelevant";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingModalities: return "MissingModalities";
    case ErrorCode::kMissingArtifacts: return "MissingArtifacts";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ofar
