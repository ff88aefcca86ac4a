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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "repurpose/core/interval.hpp"

namespace repurpose {

/// Per-segment training targets. Offsets are in seconds from the segment
/// center to the enclosing clip's start and end.
struct SegmentLabels {
  std::vector<std::uint8_t> class_label;
  std::vector<double> start_offset;
  std::vector<double> end_offset;
  std::vector<std::uint8_t> valid_regression;

  std::size_t num_segments() const noexcept { return class_label.size(); }
  std::size_t num_positive() const noexcept;

  /// Throws kInconsistentLabels when the invariants between the four
  /// vectors do not hold.
  void validate() const;
};

/// Segment t is timestamped at its center, (t + 0.5) * segment_length.
inline double segment_center(std::size_t t, double segment_length) noexcept {
  return (static_cast<double>(t) + 0.5) * segment_length;
}

/// floor(duration / segment_length), tolerant to representation error in
/// the quotient.
std::size_t segment_count(double duration, double segment_length);

SegmentLabels clips_to_labels(const std::vector<Interval>& clips, double duration,
                              double segment_length);

/// Rebuilds one clip per group of consecutive positive segments that imply
/// the same clip. Result is sorted by start.
std::vector<Interval> labels_to_clips(const SegmentLabels& labels, double segment_length);

}  // namespace repurpose
