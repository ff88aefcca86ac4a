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

#include "repurpose/data/captions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "repurpose/error.hpp"

namespace repurpose::data {
namespace {

struct Clipped {
  std::size_t index;
  double start;
  double end;
};

// Spans in start order (stable), clipped to the segment grid; spans that
// fall entirely outside it are skipped.
std::vector<Clipped> clip_spans(std::span<const CaptionSpan> spans, double limit) {
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spans[a].interval.start() < spans[b].interval.start();
  });
  std::vector<Clipped> out;
  for (std::size_t i : order) {
    const double s = std::max(0.0, spans[i].interval.start());
    const double e = std::min(limit, spans[i].interval.end());
    if (e > s) out.push_back({i, s, e});
  }
  return out;
}

// For each segment, the index into `spans` of the span with the largest
// overlap, or -1.
std::vector<long> best_span_per_segment(std::span<const CaptionSpan> spans,
                                        std::size_t num_segments, double segment_length) {
  std::vector<long> best(num_segments, -1);
  std::vector<double> best_overlap(num_segments, 0.0);
  const double limit = static_cast<double>(num_segments) * segment_length;
  for (const Clipped& c : clip_spans(spans, limit)) {
    const auto first = static_cast<std::size_t>(std::floor(c.start / segment_length));
    for (std::size_t t = first; t < num_segments; ++t) {
      const double ws = static_cast<double>(t) * segment_length;
      if (ws >= c.end) break;
      const double we = ws + segment_length;
      const double ov = std::min(we, c.end) - std::max(ws, c.start);
      if (ov > best_overlap[t]) {  // strict: ties keep the earlier span
        best_overlap[t] = ov;
        best[t] = static_cast<long>(c.index);
      }
    }
  }
  return best;
}

}  // namespace

AlignedCaptions align_captions(std::span<const CaptionSpan> spans, std::size_t num_segments,
                               double segment_length, std::size_t embedding_dim,
                               std::span<const float> empty_embedding) {
  if (!(segment_length > 0.0)) raise(Errc::kInvalidArgument, "segment length must be positive");
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].embedding.empty()) {
      raise(Errc::kMissingEmbedding, "caption span " + std::to_string(i) + " ('" +
                                         spans[i].text + "') has no embedding");
    }
    if (spans[i].embedding.size() != embedding_dim) {
      raise(Errc::kShapeMismatch, "caption span " + std::to_string(i) + " embedding has " +
                                      std::to_string(spans[i].embedding.size()) +
                                      " values, expected " + std::to_string(embedding_dim));
    }
  }
  if (!empty_embedding.empty() && empty_embedding.size() != embedding_dim) {
    raise(Errc::kShapeMismatch, "empty-token embedding width mismatch");
  }

  const auto best = best_span_per_segment(spans, num_segments, segment_length);
  AlignedCaptions out{Matrix(num_segments, embedding_dim), std::vector<std::uint8_t>(num_segments, 0)};
  for (std::size_t t = 0; t < num_segments; ++t) {
    auto row = out.features.row(t);
    if (best[t] < 0) {
      out.empty[t] = 1;
      if (!empty_embedding.empty()) std::copy(empty_embedding.begin(), empty_embedding.end(), row.begin());
      continue;
    }
    const auto& emb = spans[static_cast<std::size_t>(best[t])].embedding;
    std::copy(emb.begin(), emb.end(), row.begin());
  }
  return out;
}

std::vector<std::uint8_t> caption_empty_flags(std::span<const CaptionSpan> spans,
                                              std::size_t num_segments, double segment_length) {
  const auto best = best_span_per_segment(spans, num_segments, segment_length);
  std::vector<std::uint8_t> flags(num_segments);
  for (std::size_t t = 0; t < num_segments; ++t) flags[t] = best[t] < 0 ? 1 : 0;
  return flags;
}

}  // namespace repurpose::data
