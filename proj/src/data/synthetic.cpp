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

#include "repurpose/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "repurpose/core/labels.hpp"
#include "repurpose/data/captions.hpp"
#include "repurpose/error.hpp"
#include "repurpose/eval/decode.hpp"

namespace repurpose::data {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<float> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<float> v(dim);
  double norm = 0.0;
  for (float& x : v) {
    x = gauss(rng);
    norm += static_cast<double>(x) * x;
  }
  const float inv = static_cast<float>(1.0 / std::sqrt(norm));
  for (float& x : v) x *= inv;
  return v;
}

struct Directions {
  std::vector<float> visual;
  std::vector<float> audio;
  std::vector<float> caption;
};

std::vector<Interval> place_clips(const SyntheticConfig& cfg, double duration, std::mt19937_64& rng,
                                  std::vector<std::string>& warnings) {
  std::poisson_distribution<int> count_dist(cfg.clip_density * duration / 600.0);
  std::size_t wanted = std::max(1, count_dist(rng));
  if (cfg.cap_clips_at_top_k) wanted = std::min(wanted, eval::top_k_for_duration(duration));

  std::normal_distribution<double> length_dist(cfg.clip_duration_mean, cfg.clip_duration_std);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 2.0 * static_cast<double>(cfg.ramp_width) * cfg.segment_length;

  std::vector<Interval> clips;
  for (std::size_t n = 0; n < wanted; ++n) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      double len = std::clamp(length_dist(rng), cfg.clip_duration_min, cfg.clip_duration_max);
      len = std::min(len, duration);
      const double start = unit(rng) * (duration - len);
      const double end = std::min(duration, start + len);
      const bool clash = std::any_of(clips.begin(), clips.end(), [&](const Interval& c) {
        return start < c.end() + margin && c.start() < end + margin;
      });
      if (!clash && end > start) {
        clips.emplace_back(start, end);
        placed = true;
      }
    }
    if (!placed) {
      warnings.push_back("InfeasiblePacking: placed " + std::to_string(clips.size()) + " of " +
                         std::to_string(wanted) + " clips");
      break;
    }
  }
  std::sort(clips.begin(), clips.end(),
            [](const Interval& a, const Interval& b) { return a.start() < b.start(); });
  return clips;
}

// Signal amplitude per segment: 1 inside clips, a decaying half-strength
// ramp on the ramp_width segments outside each clip edge, else 0.
std::vector<float> signal_profile(const SegmentLabels& labels, std::size_t ramp_width) {
  const std::size_t n = labels.num_segments();
  std::vector<float> amp(n, 0.0f);
  for (std::size_t t = 0; t < n; ++t) amp[t] = labels.class_label[t] ? 1.0f : 0.0f;
  auto ramp = [&](long t, std::size_t j) {
    if (t < 0 || static_cast<std::size_t>(t) >= n || labels.class_label[t]) return;
    const float a = 0.5f * static_cast<float>(ramp_width - j + 1) / static_cast<float>(ramp_width);
    amp[t] = std::max(amp[t], a);
  };
  for (std::size_t t = 0; t < n; ++t) {
    if (!labels.class_label[t]) continue;
    const bool first = t == 0 || !labels.class_label[t - 1];
    const bool last = t + 1 == n || !labels.class_label[t + 1];
    for (std::size_t j = 1; j <= ramp_width; ++j) {
      if (first) ramp(static_cast<long>(t) - static_cast<long>(j), j);
      if (last) ramp(static_cast<long>(t + j), j);
    }
  }
  return amp;
}

Matrix planted_features(std::size_t rows, std::size_t dim, const std::vector<float>& amp,
                        const std::vector<float>& direction, double strength,
                        std::mt19937_64& rng) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  Matrix m(rows, dim);
  for (std::size_t t = 0; t < rows; ++t) {
    auto row = m.row(t);
    for (float& x : row) x = gauss(rng);
    const float a = static_cast<float>(strength) * amp[t];
    if (a == 0.0f) continue;
    for (std::size_t c = 0; c < dim; ++c) row[c] += a * direction[c];
  }
  return m;
}

std::vector<CaptionSpan> caption_spans(const SyntheticConfig& cfg, double duration,
                                       const std::vector<Interval>& clips,
                                       const std::vector<float>& direction, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<CaptionSpan> spans;
  double t = 0.0;
  while (t < duration) {
    if (unit(rng) < cfg.caption_gap_probability) {
      t += 1.0 + 4.0 * unit(rng);
      continue;
    }
    const double len = cfg.caption_span_min + (cfg.caption_span_max - cfg.caption_span_min) * unit(rng);
    const double end = std::min(duration, t + len);
    if (end <= t) break;
    Interval span(t, end);
    double inside = 0.0;
    for (const auto& c : clips) inside += overlap(span, c);
    const float a = static_cast<float>(cfg.signal_strength * inside / span.length());
    std::vector<float> emb(direction.size());
    for (std::size_t c = 0; c < emb.size(); ++c) emb[c] = gauss(rng) + a * direction[c];
    spans.push_back({span, "sentence " + std::to_string(spans.size()), std::move(emb)});
    t = end;
  }
  return spans;
}

}  // namespace

void SyntheticConfig::validate() const {
  auto fail = [](const std::string& what) { raise(Errc::kInvalidConfig, what); };
  if (num_videos == 0) fail("num_videos must be at least 1");
  if (!(duration_min > 0.0) || duration_max < duration_min) fail("duration range must be positive and ordered");
  if (!(segment_length > 0.0)) fail("segment_length must be positive");
  if (duration_min < segment_length) fail("videos must span at least one segment");
  if (!(clip_density > 0.0)) fail("clip_density must be positive");
  if (!(clip_duration_min > 0.0) || clip_duration_max < clip_duration_min) fail("clip duration bounds invalid");
  if (clip_duration_std < 0.0) fail("clip_duration_std must be non-negative");
  if (signal_strength < 0.0) fail("signal_strength must be non-negative");
  if (ramp_width == 0) fail("ramp_width must be positive");
  if (feature_dims.visual == 0 || feature_dims.audio == 0 || feature_dims.caption == 0) {
    fail("feature dims must be positive");
  }
  if (!(caption_span_min > 0.0) || caption_span_max < caption_span_min) fail("caption span bounds invalid");
  if (caption_gap_probability < 0.0 || caption_gap_probability >= 1.0) fail("caption_gap_probability must be in [0, 1)");
}

std::vector<VideoSample> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 corpus_rng(splitmix64(cfg.seed));
  const Directions dirs{random_unit(cfg.feature_dims.visual, corpus_rng),
                        random_unit(cfg.feature_dims.audio, corpus_rng),
                        random_unit(cfg.feature_dims.caption, corpus_rng)};

  std::vector<VideoSample> corpus;
  corpus.reserve(cfg.num_videos);
  for (std::size_t i = 0; i < cfg.num_videos; ++i) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(i + 1)));
    std::uniform_real_distribution<double> dur_dist(cfg.duration_min, cfg.duration_max);

    VideoSample s;
    char id[32];
    std::snprintf(id, sizeof id, "synth_%05zu", i);
    s.video_id = id;
    s.duration = std::round(dur_dist(rng) * 1000.0) / 1000.0;
    s.segment_length = cfg.segment_length;
    s.clips = place_clips(cfg, s.duration, rng, s.warnings);

    const std::size_t rows = segment_count(s.duration, s.segment_length);
    const auto labels = clips_to_labels(s.clips, s.duration, s.segment_length);
    const auto amp = signal_profile(labels, cfg.ramp_width);
    s.visual = planted_features(rows, cfg.feature_dims.visual, amp, dirs.visual, cfg.signal_strength, rng);
    s.audio = planted_features(rows, cfg.feature_dims.audio, amp, dirs.audio, cfg.signal_strength, rng);

    s.caption_spans = caption_spans(cfg, s.duration, s.clips, dirs.caption, rng);
    auto aligned = align_captions(s.caption_spans, rows, s.segment_length, cfg.feature_dims.caption);
    s.caption = std::move(aligned.features);
    s.caption_empty = std::move(aligned.empty);
    s.validate();
    corpus.push_back(std::move(s));
  }
  return corpus;
}

nlohmann::ordered_json to_json(const SyntheticConfig& c) {
  nlohmann::ordered_json j;
  j["num_videos"] = c.num_videos;
  j["duration_min"] = c.duration_min;
  j["duration_max"] = c.duration_max;
  j["segment_length"] = c.segment_length;
  j["clip_density"] = c.clip_density;
  j["clip_duration_mean"] = c.clip_duration_mean;
  j["clip_duration_std"] = c.clip_duration_std;
  j["clip_duration_min"] = c.clip_duration_min;
  j["clip_duration_max"] = c.clip_duration_max;
  j["signal_strength"] = c.signal_strength;
  j["ramp_width"] = c.ramp_width;
  j["feature_dims"] = {{"visual", c.feature_dims.visual},
                       {"audio", c.feature_dims.audio},
                       {"caption", c.feature_dims.caption}};
  j["caption_span_min"] = c.caption_span_min;
  j["caption_span_max"] = c.caption_span_max;
  j["caption_gap_probability"] = c.caption_gap_probability;
  j["cap_clips_at_top_k"] = c.cap_clips_at_top_k;
  j["seed"] = c.seed;
  return j;
}

SyntheticConfig synthetic_config_from_json(const nlohmann::ordered_json& j) {
  SyntheticConfig c;
  try {
    c.num_videos = j.value("num_videos", c.num_videos);
    c.duration_min = j.value("duration_min", c.duration_min);
    c.duration_max = j.value("duration_max", c.duration_max);
    c.segment_length = j.value("segment_length", c.segment_length);
    c.clip_density = j.value("clip_density", c.clip_density);
    c.clip_duration_mean = j.value("clip_duration_mean", c.clip_duration_mean);
    c.clip_duration_std = j.value("clip_duration_std", c.clip_duration_std);
    c.clip_duration_min = j.value("clip_duration_min", c.clip_duration_min);
    c.clip_duration_max = j.value("clip_duration_max", c.clip_duration_max);
    c.signal_strength = j.value("signal_strength", c.signal_strength);
    c.ramp_width = j.value("ramp_width", c.ramp_width);
    if (j.contains("feature_dims")) {
      const auto& d = j.at("feature_dims");
      c.feature_dims.visual = d.value("visual", c.feature_dims.visual);
      c.feature_dims.audio = d.value("audio", c.feature_dims.audio);
      c.feature_dims.caption = d.value("caption", c.feature_dims.caption);
    }
    c.caption_span_min = j.value("caption_span_min", c.caption_span_min);
    c.caption_span_max = j.value("caption_span_max", c.caption_span_max);
    c.caption_gap_probability = j.value("caption_gap_probability", c.caption_gap_probability);
    c.cap_clips_at_top_k = j.value("cap_clips_at_top_k", c.cap_clips_at_top_k);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::kInvalidConfig, std::string("malformed synthetic config: ") + e.what());
  }
  return c;
}

}  // namespace repurpose::data
