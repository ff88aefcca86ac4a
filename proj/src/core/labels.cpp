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

#include "repurpose/core/labels.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "repurpose/error.hpp"

namespace repurpose {

std::size_t SegmentLabels::num_positive() const noexcept {
  return static_cast<std::size_t>(std::count(class_label.begin(), class_label.end(), 1));
}

void SegmentLabels::validate() const {
  const std::size_t n = class_label.size();
  if (start_offset.size() != n || end_offset.size() != n || valid_regression.size() != n) {
    raise(Errc::kInconsistentLabels, "label vectors differ in length");
  }
  for (std::size_t t = 0; t < n; ++t) {
    const bool positive = class_label[t] == 1;
    if (class_label[t] > 1 || (valid_regression[t] != 0) != positive) {
      raise(Errc::kInconsistentLabels, "segment " + std::to_string(t) + " has a bad class flag");
    }
    if (!positive && (start_offset[t] != 0.0 || end_offset[t] != 0.0)) {
      raise(Errc::kInconsistentLabels,
            "negative segment " + std::to_string(t) + " carries offsets");
    }
    if (positive && (start_offset[t] < 0.0 || end_offset[t] < 0.0)) {
      raise(Errc::kInconsistentLabels, "negative offset at segment " + std::to_string(t));
    }
  }
}

std::size_t segment_count(double duration, double segment_length) {
  if (!(duration > 0.0) || !(segment_length > 0.0)) {
    raise(Errc::kInvalidArgument, "duration and segment length must be positive");
  }
  return static_cast<std::size_t>(std::floor(duration / segment_length + 1e-9));
}

SegmentLabels clips_to_labels(const std::vector<Interval>& clips, double duration,
                              double segment_length) {
  const std::size_t n = segment_count(duration, segment_length);
  const auto sorted = sorted_disjoint_clips(clips, duration);

  SegmentLabels labels;
  labels.class_label.assign(n, 0);
  labels.start_offset.assign(n, 0.0);
  labels.end_offset.assign(n, 0.0);
  labels.valid_regression.assign(n, 0);

  // Both sequences are ordered in time, so a single sweep suffices.
  std::size_t c = 0;
  for (std::size_t t = 0; t < n && c < sorted.size(); ++t) {
    const double tau = segment_center(t, segment_length);
    while (c < sorted.size() && sorted[c].end() <= tau) ++c;
    if (c == sorted.size()) break;
    if (sorted[c].contains(tau)) {
      labels.class_label[t] = 1;
      labels.valid_regression[t] = 1;
      labels.start_offset[t] = tau - sorted[c].start();
      labels.end_offset[t] = sorted[c].end() - tau;
    }
  }
  return labels;
}

std::vector<Interval> labels_to_clips(const SegmentLabels& labels, double segment_length) {
  labels.validate();
  std::vector<Interval> clips;

  struct Group {
    double start;
    double end;
  };
  std::optional<Group> group;
  auto flush = [&] {
    if (group) clips.emplace_back(std::max(0.0, group->start), group->end);
    group.reset();
  };

  for (std::size_t t = 0; t < labels.num_segments(); ++t) {
    if (labels.class_label[t] == 0) {
      flush();
      continue;
    }
    const double tau = segment_center(t, segment_length);
    const double start = tau - labels.start_offset[t];
    const double end = tau + labels.end_offset[t];
    if (group && tau >= group->end) flush();  // adjacent clip begins
    if (!group) {
      group = Group{start, end};
      continue;
    }
    if (std::abs(start - group->start) > segment_length ||
        std::abs(end - group->end) > segment_length) {
      std::ostringstream msg;
      msg << "segment " << t << " implies clip [" << start << ", " << end
          << ") but its run implies [" << group->start << ", " << group->end << ")";
      raise(Errc::kInconsistentLabels, msg.str());
    }
  }
  flush();
  return clips;
}

}  // namespace repurpose
