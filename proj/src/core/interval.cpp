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

#include "repurpose/core/interval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "repurpose/error.hpp"

namespace repurpose {

Interval::Interval(double start, double end) : start_(start), end_(end) {
  if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0 || !(end > start)) {
    std::ostringstream msg;
    msg << "interval [" << start << ", " << end << ") must satisfy 0 <= start < end";
    raise(Errc::kInvalidInterval, msg.str());
  }
}

double overlap(const Interval& a, const Interval& b) noexcept {
  return std::max(0.0, std::min(a.end(), b.end()) - std::max(a.start(), b.start()));
}

double tiou(const Interval& a, const Interval& b) noexcept {
  const double inter = overlap(a, b);
  const double uni = a.length() + b.length() - inter;
  return inter / uni;
}

double giou_1d(const Interval& a, const Interval& b) noexcept {
  const double inter = overlap(a, b);
  const double uni = a.length() + b.length() - inter;
  const double hull = std::max(a.end(), b.end()) - std::min(a.start(), b.start());
  return inter / uni - (hull - uni) / hull;
}

std::vector<Interval> sorted_disjoint_clips(std::vector<Interval> clips, double duration) {
  for (const auto& c : clips) {
    if (c.end() > duration) {
      std::ostringstream msg;
      msg << "clip [" << c.start() << ", " << c.end() << ") exceeds duration " << duration;
      raise(Errc::kClipOutOfRange, msg.str());
    }
  }
  std::sort(clips.begin(), clips.end(),
            [](const Interval& x, const Interval& y) { return x.start() < y.start(); });
  for (std::size_t i = 1; i < clips.size(); ++i) {
    if (clips[i].start() < clips[i - 1].end()) {
      std::ostringstream msg;
      msg << "clips [" << clips[i - 1].start() << ", " << clips[i - 1].end() << ") and ["
          << clips[i].start() << ", " << clips[i].end() << ") intersect";
      raise(Errc::kOverlappingClips, msg.str());
    }
  }
  return clips;
}

}  // namespace repurpose
