// Copyright 2026 The repurpose-loc Authors
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

#include "repurpose/error.hpp"

namespace repurpose {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kInvalidInterval: return "InvalidInterval";
    case Errc::kOverlappingClips: return "OverlappingClips";
    case Errc::kClipOutOfRange: return "ClipOutOfRange";
    case Errc::kInconsistentLabels: return "InconsistentLabels";
    case Errc::kMissingEmbedding: return "MissingEmbedding";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kMaskMismatch: return "MaskMismatch";
    case Errc::kCorruptContainer: return "CorruptContainer";
    case Errc::kSchemaError: return "SchemaError";
    case Errc::kTooFewEntries: return "TooFewEntries";
    case Errc::kUnknownBranch: return "UnknownBranch";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kInvalidSchedule: return "InvalidSchedule";
    case Errc::kInvalidConfig: return "InvalidConfig";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kCheckpointWriteError: return "CheckpointWriteError";
    case Errc::kVideoIdMismatch: return "VideoIdMismatch";
    case Errc::kConfigMismatch: return "ConfigMismatch";
    case Errc::kIoError: return "IOError";
  }
  return "Unknown";
}

}  // namespace repurpose
