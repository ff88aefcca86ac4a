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

#include "repurpose/eval/decode.hpp"

#include <algorithm>
#include <cmath>

#include "repurpose/core/labels.hpp"

namespace repurpose::eval {

namespace {

bool ranks_before(const ClipPrediction& a, const ClipPrediction& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.interval.start() != b.interval.start()) return a.interval.start() < b.interval.start();
  return a.source_segment < b.source_segment;
}

}  // namespace

std::vector<ClipPrediction> decode(const model::ModelOutput& output, double segment_length, double duration,
                                   double conf_threshold) {
  std::vector<ClipPrediction> raw;
  for (std::size_t t = 0; t < output.size(); ++t) {
    const double score = output.prob_fused[t];
    if (!(score >= conf_threshold)) continue;
    const double tau = segment_center(t, segment_length);
    const double start = std::clamp(tau - output.start_offset[t], 0.0, duration);
    const double end = std::clamp(tau + output.end_offset[t], 0.0, duration);
    if (!(end > start)) continue;
    raw.push_back({Interval(start, end), score, t});
  }
  std::stable_sort(raw.begin(), raw.end(), [](const ClipPrediction& a, const ClipPrediction& b) {
    if (a.interval.start() != b.interval.start()) return a.interval.start() < b.interval.start();
    return a.interval.end() < b.interval.end();
  });

  std::vector<ClipPrediction> merged;
  for (const auto& c : raw) {
    auto dup = std::find_if(merged.rbegin(), merged.rend(), [&](const ClipPrediction& m) {
      return std::abs(m.interval.start() - c.interval.start()) <= kDuplicateTolerance &&
             std::abs(m.interval.end() - c.interval.end()) <= kDuplicateTolerance;
    });
    if (dup == merged.rend()) {
      merged.push_back(c);
    } else if (c.score > dup->score || (c.score == dup->score && c.source_segment < dup->source_segment)) {
      dup->score = c.score;
      dup->source_segment = c.source_segment;
    }
  }
  return merged;
}

std::vector<ClipPrediction> soft_nms(std::vector<ClipPrediction> pool, const SoftNmsParams& params) {
  std::erase_if(pool, [&](const ClipPrediction& c) { return c.score < params.score_floor; });
  std::vector<ClipPrediction> kept;
  kept.reserve(pool.size());
  while (!pool.empty()) {
    auto best = std::min_element(pool.begin(), pool.end(), ranks_before);
    const ClipPrediction chosen = *best;
    pool.erase(best);
    kept.push_back(chosen);
    for (auto& c : pool) {
      const double o = tiou(chosen.interval, c.interval);
      c.score *= std::exp(-(o * o) / params.sigma);
    }
    std::erase_if(pool, [&](const ClipPrediction& c) { return c.score < params.score_floor; });
  }
  std::stable_sort(kept.begin(), kept.end(), ranks_before);
  return kept;
}

std::size_t top_k_for_duration(double duration) {
  const double k = std::floor(3.0 * duration / 600.0 + 0.5);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(0.0, k)));
}

std::vector<ClipPrediction> postprocess(const model::ModelOutput& output, double segment_length, double duration,
                                        double conf_threshold, const SoftNmsParams& nms) {
  auto kept = soft_nms(decode(output, segment_length, duration, conf_threshold), nms);
  const std::size_t k = top_k_for_duration(duration);
  if (kept.size() > k) kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(k), kept.end());
  return kept;
}

}  // namespace repurpose::eval
