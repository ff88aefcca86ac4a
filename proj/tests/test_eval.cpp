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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "repurpose/data/synthetic.hpp"
#include "repurpose/error.hpp"
#include "repurpose/eval/decode.hpp"
#include "repurpose/eval/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace repurpose::eval {
namespace {

model::ModelOutput single_segment_output(std::size_t t, std::size_t hot, double prob, double ds, double de) {
  model::ModelOutput o;
  o.prob_fused.assign(t, 0.0);
  o.prob_visual.assign(t, 0.0);
  o.prob_audio.assign(t, 0.0);
  o.start_offset.assign(t, 0.0);
  o.end_offset.assign(t, 0.0);
  o.prob_fused[hot] = prob;
  o.start_offset[hot] = ds;
  o.end_offset[hot] = de;
  return o;
}

TEST(Decode, OffsetArithmetic) {
  const auto out = decode(single_segment_output(100, 30, 0.9, 20.5, 39.5), 1.0, 100.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].interval.start(), 10.0);
  EXPECT_DOUBLE_EQ(out[0].interval.end(), 70.0);
  EXPECT_DOUBLE_EQ(out[0].score, 0.9);
  EXPECT_EQ(out[0].source_segment, 30u);
}

TEST(Decode, ClampsToVideo) {
  const auto out = decode(single_segment_output(20, 2, 0.7, 50.0, 100.0), 1.0, 20.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].interval.start(), 0.0);
  EXPECT_EQ(out[0].interval.end(), 20.0);
}

TEST(Decode, ThresholdFiltersEverything) {
  auto o = single_segment_output(10, 4, 0.49, 1.0, 1.0);
  EXPECT_TRUE(decode(o, 1.0, 10.0).empty());
  EXPECT_EQ(decode(o, 1.0, 10.0, 0.4).size(), 1u);
}

TEST(Decode, DropsZeroLength) {
  EXPECT_TRUE(decode(single_segment_output(10, 4, 0.9, 0.0, 0.0), 1.0, 10.0).empty());
}

TEST(Decode, MergesDuplicatesKeepingHigherScore) {
  model::ModelOutput o = single_segment_output(10, 3, 0.6, 2.5, 2.5);
  o.prob_fused[4] = 0.8;
  o.start_offset[4] = 3.5;
  o.end_offset[4] = 1.5;
  const auto out = decode(o, 1.0, 10.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].score, 0.8);
  EXPECT_EQ(out[0].source_segment, 4u);
}

TEST(SoftNms, DecayExample) {
  // [0, 8] and [2, 10]: overlap 6, union 10.
  std::vector<ClipPrediction> c{{Interval(0, 8), 0.9, 0}, {Interval(2, 10), 0.8, 1}};
  const auto out = soft_nms(c);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].score, 0.9);
  EXPECT_NEAR(out[1].score, oracle::soft_nms_spot_value(), 1e-12);
  EXPECT_NEAR(out[1].score, 0.3894018, 1e-6);
  EXPECT_NEAR(out[1].score, 0.8 * std::exp(-0.72), 1e-15);
}

TEST(SoftNms, DisjointAndSingle) {
  std::vector<ClipPrediction> c{{Interval(0, 5), 0.5, 0}, {Interval(5, 9), 0.7, 1}};
  const auto out = soft_nms(c);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].score, 0.7);
  EXPECT_EQ(out[1].score, 0.5);
  const auto one = soft_nms({{Interval(1, 2), 0.3, 0}});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].score, 0.3);
  EXPECT_TRUE(soft_nms({}).empty());
}

TEST(SoftNms, TieBreakIsDeterministic) {
  std::vector<ClipPrediction> c{{Interval(50, 60), 0.5, 7}, {Interval(10, 20), 0.5, 9}, {Interval(10, 20.5), 0.5, 2}};
  const auto out = soft_nms(c, {1e-6, 1e-3});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].source_segment, 2u);
  EXPECT_EQ(out[1].source_segment, 7u);
}

TEST(SoftNms, NeverRaisesScoresAndKeepsTop1) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = oracle::random_candidates(rng, 15);
    const auto out = soft_nms(c);
    ASSERT_FALSE(out.empty());
    const auto top = *std::max_element(c.begin(), c.end(), [](auto& a, auto& b) { return a.score < b.score; });
    EXPECT_EQ(out[0].source_segment, top.source_segment);
    EXPECT_EQ(out[0].score, top.score);
    for (const auto& o : out) {
      EXPECT_LE(o.score, c[o.source_segment].score);
      EXPECT_GE(o.score, 1e-3);
    }
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GE(out[i - 1].score, out[i].score);
  }
}

TEST(SoftNms, ConvergesToHardNms) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = oracle::random_candidates(rng, 15);
    const auto soft = soft_nms(c, {1e-6, 1e-3});
    const auto hard = oracle::hard_nms(c);
    ASSERT_EQ(soft.size(), hard.size()) << "trial " << trial;
    for (std::size_t i = 0; i < soft.size(); ++i) {
      EXPECT_EQ(soft[i].source_segment, hard[i].source_segment);
      EXPECT_EQ(soft[i].score, hard[i].score);
    }
  }
}

TEST(TopK, DurationRule) {
  EXPECT_EQ(top_k_for_duration(600), 3u);
  EXPECT_EQ(top_k_for_duration(1200), 6u);
  EXPECT_EQ(top_k_for_duration(300), 2u);
  EXPECT_EQ(top_k_for_duration(10), 1u);
  EXPECT_EQ(top_k_for_duration(299), 1u);
}

TEST(Postprocess, TruncatesToTopK) {
  model::ModelOutput o;
  const std::size_t t = 600;
  o.prob_fused.assign(t, 0.0);
  o.start_offset.assign(t, 0.0);
  o.end_offset.assign(t, 0.0);
  o.prob_visual = o.prob_audio = o.prob_fused;
  for (std::size_t i = 5; i < t; i += 50) {
    o.prob_fused[i] = 0.6 + i * 1e-4;
    o.start_offset[i] = 2.0;
    o.end_offset[i] = 2.0;
  }
  const auto out = postprocess(o, 1.0, 600.0);
  EXPECT_EQ(out.size(), 3u);
}

VideoPredictions vp(std::string id, std::vector<ClipPrediction> p) { return {std::move(id), std::move(p)}; }

TEST(AveragePrecision, WorkedExample) {
  const std::vector<VideoGroundTruth> gt{{"v", {Interval(0, 10)}}};
  // tiou([0,3],[0,10]) = 0.3, tiou([0,8],[0,10]) = 0.8
  const std::vector<VideoPredictions> p{vp("v", {{Interval(0, 3), 0.9, 0}, {Interval(0, 8), 0.8, 1}})};
  EXPECT_DOUBLE_EQ(average_precision(p, gt, 0.5), 0.5);
}

TEST(AveragePrecision, EdgeCases) {
  const std::vector<VideoGroundTruth> gt{{"v", {Interval(0, 10)}}, {"w", {}}};
  EXPECT_EQ(average_precision({}, gt, 0.5), 0.0);
  const std::vector<VideoPredictions> perfect{vp("v", {{Interval(0, 10), 0.4, 0}})};
  EXPECT_EQ(average_precision(perfect, gt, 1.0), 1.0);
  const std::vector<VideoGroundTruth> none{{"v", {}}};
  EXPECT_EQ(average_precision(perfect, none, 0.5), 0.0);
  const std::vector<VideoPredictions> stray{vp("zzz", {{Interval(0, 1), 0.4, 0}})};
  try {
    average_precision(stray, gt, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kVideoIdMismatch);
  }
}

TEST(AveragePrecision, MatchesBruteForceAndIsMonotone) {
  std::mt19937_64 rng(13);
  std::vector<VideoPredictions> preds;
  std::vector<VideoGroundTruth> gt;
  for (int trial = 0; trial < 200; ++trial) {
    oracle::random_ap_corpus(rng, preds, gt);
    for (double thr : kTiouThresholds) {
      EXPECT_NEAR(average_precision(preds, gt, thr), oracle::brute_force_ap(preds, gt, thr), 1e-9) << "trial " << trial;
    }
    EXPECT_LE(average_precision(preds, gt, 0.9), average_precision(preds, gt, 0.5) + 1e-12);
  }
}

TEST(Evaluate, OracleScoresOneEverywhere) {
  auto cfg = testing::tiny_corpus_config(20, 3);
  cfg.cap_clips_at_top_k = true;
  const auto corpus = data::generate_synthetic(cfg);
  const auto result = evaluate(oracle_output, corpus);
  for (double ap : result.report.ap_per_threshold) EXPECT_DOUBLE_EQ(ap, 1.0);
  EXPECT_DOUBLE_EQ(result.report.average, 1.0);
  EXPECT_EQ(result.predictions.size(), corpus.size());
}

TEST(Evaluate, ConstantPredictorScoresNearZero) {
  const auto corpus = data::generate_synthetic(testing::tiny_corpus_config(10, 4));
  const auto result = evaluate(
      [](const VideoSample& v) {
        model::ModelOutput o;
        const std::size_t t = v.num_segments();
        o.prob_fused.assign(t, 0.3);
        o.prob_visual = o.prob_audio = o.prob_fused;
        o.start_offset.assign(t, 1.0);
        o.end_offset.assign(t, 1.0);
        return o;
      },
      corpus);
  EXPECT_EQ(result.report.average, 0.0);
}

TEST(Report, AverageIdentityAndJsonRoundTrip) {
  auto cfg = testing::tiny_corpus_config(6, 5);
  const auto corpus = data::generate_synthetic(cfg);
  std::mt19937_64 rng(5);
  const auto result = evaluate(
      [&](const VideoSample& v) {
        auto o = oracle_output(v);
        std::normal_distribution<double> g(0.0, 3.0);
        for (auto& x : o.start_offset) x = std::max(0.0, x + g(rng));
        for (auto& x : o.end_offset) x = std::max(0.0, x + g(rng));
        return o;
      },
      corpus);
  const auto& r = result.report;
  double sum = 0.0;
  for (double a : r.ap_per_threshold) sum += a;
  EXPECT_NEAR(r.average, sum / 5.0, 1e-12);
  EXPECT_EQ(eval_report_from_json(to_json(r)), r);
  EXPECT_EQ(r.per_video.size(), corpus.size());
  const std::pair<std::string, EvalReport> row{"oracle+noise", r};
  const std::string table = format_table({&row, 1});
  EXPECT_NE(table.find("Avg."), std::string::npos);
  EXPECT_NE(table.find("oracle+noise"), std::string::npos);
}

TEST(Report, MalformedJsonIsSchemaError) {
  try {
    eval_report_from_json(nlohmann::ordered_json{{"average", 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSchemaError);
  }
}

}  // namespace
}  // namespace repurpose::eval
