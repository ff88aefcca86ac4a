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

#include <vector>

namespace repurpose {

/// Half-open temporal interval in seconds. Construction enforces
/// finite endpoints, start >= 0 and end > start.
class Interval {
 public:
  Interval(double start, double end);

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  double length() const noexcept { return end_ - start_; }
  bool contains(double t) const noexcept { return t >= start_ && t < end_; }

  bool operator==(const Interval&) const = default;

 private:
  double start_;
  double end_;
};

/// Length of the intersection; 0 when disjoint.
double overlap(const Interval& a, const Interval& b) noexcept;

/// Temporal intersection over union.
double tiou(const Interval& a, const Interval& b) noexcept;

/// One-dimensional generalized IoU: IoU minus the fraction of the enclosing
/// hull not covered by the union. Range (-1, 1].
double giou_1d(const Interval& a, const Interval& b) noexcept;

/// Sorts by start and rejects overlapping or out-of-range clips.
std::vector<Interval> sorted_disjoint_clips(std::vector<Interval> clips, double duration);

}  // namespace repurpose
