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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "repurpose/autograd/tape.hpp"
#include "repurpose/data/synthetic.hpp"
#include "repurpose/error.hpp"
#include "repurpose/model/checkpoint.hpp"
#include "repurpose/model/network.hpp"
#include "repurpose/train/trainer.hpp"
#include "test_support.hpp"

namespace repurpose::model {
namespace {

namespace fs = std::filesystem;

ModelConfig small_config(FeatureDims dims = {12, 16, 8}) {
  ModelConfig c;
  c.d_model = 16;
  c.n_heads = 4;
  c.head_hidden = 16;
  c.n_self_layers = c.n_caption_layers = c.n_fusion_layers = 1;
  c.input_dims = dims;
  c.regression_scale = 5.0;
  return c;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, float scale = 1.0f) {
  std::normal_distribution<float> g(0.0f, scale);
  Matrix m(r, c);
  for (float& x : m.values()) x = g(rng);
  return m;
}

VideoSample random_video(std::size_t t, FeatureDims dims, std::mt19937_64& rng, float scale = 1.0f) {
  VideoSample v;
  v.video_id = "rand" + std::to_string(t);
  v.duration = static_cast<double>(t);
  v.visual = random_matrix(t, dims.visual, rng, scale);
  v.audio = random_matrix(t, dims.audio, rng, scale);
  v.caption = random_matrix(t, dims.caption, rng, scale);
  v.caption_empty.assign(t, 0);
  for (std::size_t i = 0; i < t; i += 3) v.caption_empty[i] = 1;
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_output_diff(const ModelOutput& a, const ModelOutput& b) {
  return std::max({max_abs_diff(a.prob_fused, b.prob_fused), max_abs_diff(a.prob_visual, b.prob_visual),
                   max_abs_diff(a.prob_audio, b.prob_audio), max_abs_diff(a.start_offset, b.start_offset),
                   max_abs_diff(a.end_offset, b.end_offset)});
}

TEST(Config, ValidationAndModalityNames) {
  auto c = small_config();
  c.n_heads = 3;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.n_fusion_layers = 0;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.modalities = {false, false, false};
  EXPECT_THROW(c.validate(), Error);
  for (const char* s : {"A", "V", "C", "A&V", "A&V&C"}) EXPECT_EQ(ModalitySet::parse(s).to_string(), s);
  EXPECT_EQ(ModalitySet::parse("AV"), ModalitySet::parse("A&V"));
  EXPECT_THROW(ModalitySet::parse("X"), Error);
  EXPECT_EQ(model_config_from_json(to_json(small_config())), small_config());
}

TEST(Projection, ShapesAndRowwiseMap) {
  std::mt19937_64 rng(1);
  Network net(small_config(), 1);
  for (std::size_t t : {0u, 5u}) {
    autograd::Tape tape(false);
    const auto v = random_video(t, small_config().input_dims, rng);
    const auto p = net.project_inputs(tape, v.visual, v.audio, v.caption, v.caption_empty);
    for (auto var : {p.visual, p.audio, p.caption}) {
      EXPECT_EQ(tape.value(var).rows(), t);
      EXPECT_EQ(tape.value(var).cols(), 16u);
    }
  }
  autograd::Tape tape(false);
  auto v = random_video(4, small_config().input_dims, rng);
  for (std::size_t c = 0; c < v.visual.cols(); ++c) v.visual(2, c) = v.visual(0, c);
  const auto p = net.project_inputs(tape, v.visual, v.audio, v.caption, v.caption_empty);
  const auto& out = tape.value(p.visual);
  for (std::size_t c = 0; c < out.cols(); ++c) EXPECT_EQ(out(0, c), out(2, c));
}

TEST(Projection, EmptyCaptionRowsShareTheLearnedToken) {
  std::mt19937_64 rng(2);
  Network net(small_config(), 1);
  auto v = random_video(6, small_config().input_dims, rng);
  v.caption_empty = {1, 0, 0, 1, 0, 0};
  autograd::Tape tape(false);
  const auto& out = tape.value(net.project_inputs(tape, v.visual, v.audio, v.caption, v.caption_empty).caption);
  for (std::size_t c = 0; c < out.cols(); ++c) EXPECT_EQ(out(0, c), out(3, c));
  EXPECT_NE(out(0, 0), out(1, 0));
}

TEST(Network, EmptyAndSingleSegmentVideos) {
  std::mt19937_64 rng(3);
  Network net(small_config(), 1);
  for (std::size_t t : {0u, 1u}) {
    const auto out = net.predict(random_video(t, small_config().input_dims, rng));
    EXPECT_EQ(out.size(), t);
    EXPECT_EQ(out.start_offset.size(), t);
    for (double p : out.prob_fused) EXPECT_TRUE(std::isfinite(p));
  }
}

TEST(Network, ZeroHeadsGiveHalfAndZero) {
  std::mt19937_64 rng(4);
  Network net(small_config(), 1);
  net.zero_head_outputs();
  const auto out = net.predict(random_video(7, small_config().input_dims, rng));
  for (std::size_t t = 0; t < 7; ++t) {
    EXPECT_EQ(out.prob_fused[t], 0.5);
    EXPECT_EQ(out.prob_visual[t], 0.5);
    EXPECT_EQ(out.prob_audio[t], 0.5);
    EXPECT_EQ(out.start_offset[t], 0.0);
    EXPECT_EQ(out.end_offset[t], 0.0);
  }
}

TEST(Network, OutputRangesOnManyRandomInputs) {
  std::mt19937_64 rng(5);
  Network net(small_config(), 2);
  std::size_t checked = 0;
  for (int i = 0; i < 100; ++i) {
    const auto out = net.predict(random_video(100, small_config().input_dims, rng, 3.0f));
    for (std::size_t t = 0; t < out.size(); ++t) {
      for (double p : {out.prob_fused[t], out.prob_visual[t], out.prob_audio[t]}) {
        ASSERT_GT(p, 0.0);
        ASSERT_LT(p, 1.0);
      }
      ASSERT_GE(out.start_offset[t], 0.0);
      ASSERT_GE(out.end_offset[t], 0.0);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 10000u);
}

TEST(Network, LargeInputsStayFinite) {
  std::mt19937_64 rng(6);
  Network net(small_config(), 3);
  const auto out = net.predict(random_video(20, small_config().input_dims, rng, 1000.0f));
  for (std::size_t t = 0; t < out.size(); ++t) {
    EXPECT_TRUE(std::isfinite(out.prob_fused[t]));
    EXPECT_TRUE(std::isfinite(out.start_offset[t]));
    EXPECT_TRUE(std::isfinite(out.end_offset[t]));
  }
}

TEST(Network, BatchedOutputsMatchAndStripPadding) {
  std::mt19937_64 rng(7);
  Network net(small_config(), 4);
  const auto a = random_video(30, small_config().input_dims, rng);
  const auto b = random_video(50, small_config().input_dims, rng);
  const VideoSample* items[] = {&a, &b, &a};
  const auto out = net.forward(collate(items));
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].size(), 30u);
  EXPECT_EQ(out[1].size(), 50u);
  EXPECT_EQ(max_output_diff(out[0], out[2]), 0.0);
  EXPECT_LE(max_output_diff(out[0], net.predict(a)), 1e-5);
  EXPECT_LE(max_output_diff(out[1], net.predict(b)), 1e-5);
}

TEST(Network, PaddedRowsDoNotLeak) {
  std::mt19937_64 rng(8);
  Network net(small_config(), 5);
  const auto a = random_video(30, small_config().input_dims, rng);
  const auto b = random_video(50, small_config().input_dims, rng);
  const VideoSample* items[] = {&a, &b};
  Batch batch = collate(items);
  autograd::Tape t1(false);
  const auto before = activate(net.run(t1, batch.items[0], {}));
  for (std::size_t r = 30; r < 50; ++r) {
    for (Matrix* m : {&batch.items[0].visual, &batch.items[0].audio, &batch.items[0].caption}) {
      for (float& x : m->row(r)) x = 1e3f * static_cast<float>(r);
    }
  }
  autograd::Tape t2(false);
  const auto after = activate(net.run(t2, batch.items[0], {}));
  EXPECT_LE(max_output_diff(before, after), 1e-5);
}

TEST(Network, PermutationEquivariantWithoutPositions) {
  std::mt19937_64 rng(9);
  auto cfg = small_config();
  cfg.positional_encoding = false;
  Network net(cfg, 6);
  const auto v = random_video(12, cfg.input_dims, rng);
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  VideoSample p = v;
  for (std::size_t i = 0; i < 12; ++i) {
    for (auto [dst, src] : {std::pair{&p.visual, &v.visual}, {&p.audio, &v.audio}, {&p.caption, &v.caption}}) {
      std::copy(src->row(perm[i]).begin(), src->row(perm[i]).end(), dst->row(i).begin());
    }
    p.caption_empty[i] = v.caption_empty[perm[i]];
  }
  const auto o = net.predict(v);
  const auto q = net.predict(p);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_NEAR(q.prob_fused[i], o.prob_fused[perm[i]], 1e-5);
    EXPECT_NEAR(q.start_offset[i], o.start_offset[perm[i]], 1e-4);
  }
}

TEST(Network, GradientReachesEveryProjection) {
  auto corpus = data::generate_synthetic(testing::tiny_corpus_config(2, 10));
  Network net(small_config(), 7);
  std::mt19937_64 rng(1);
  const VideoSample* batch[] = {&corpus[0], &corpus[1]};
  net.zero_grad();
  train::accumulate_batch_gradients(net, batch, {}, {true, &rng}, "probe");
  for (const char* prefix : {"proj.visual", "proj.audio", "proj.caption"}) {
    double norm = 0.0;
    for (const auto& p : net.parameters()) {
      if (!p.name.starts_with(prefix)) continue;
      for (float g : p.grad.values()) norm += double(g) * g;
    }
    EXPECT_GT(norm, 0.0) << prefix;
  }
}

TEST(Network, ParameterCountIsDeterministic) {
  ModelConfig c;  // 512 wide, 3/3/3 layers, 8 heads
  c.input_dims = {16, 16, 16};
  const Network a(c, 1);
  const Network b(c, 2);
  EXPECT_EQ(a.parameter_count(), b.parameter_count());
  EXPECT_GT(a.parameter_count(), 10'000'000u);
}

TEST(Network, BatchLossIsMeanOfSingleLosses) {
  auto corpus = data::generate_synthetic(testing::tiny_corpus_config(3, 11));
  Network net(small_config(), 8);
  const VideoSample* all[] = {&corpus[0], &corpus[1], &corpus[2]};
  const double batched = train::batch_loss(net, all, {}).total;
  double sum = 0.0;
  for (const auto* v : all) sum += train::batch_loss(net, {&v, 1}, {}).total;
  EXPECT_NEAR(3.0 * batched, sum, 1e-5 * std::abs(sum));
}

TEST(Network, SingleModalityIgnoresOtherStreams) {
  std::mt19937_64 rng(12);
  auto cfg = small_config();
  cfg.modalities = ModalitySet::parse("V");
  Network net(cfg, 9);
  auto v = random_video(15, cfg.input_dims, rng);
  const auto before = net.predict(v);
  EXPECT_FALSE(before.branch_heads);
  v.audio = random_matrix(15, cfg.input_dims.audio, rng);
  v.caption = random_matrix(15, cfg.input_dims.caption, rng);
  v.caption_empty.assign(15, 1);
  EXPECT_EQ(max_output_diff(before, net.predict(v)), 0.0);
  for (const auto& p : net.parameters()) {
    EXPECT_FALSE(p.name.starts_with("proj.audio") || p.name.starts_with("head.visual")) << p.name;
  }
  autograd::Tape tape(false);
  const auto enc = net.encode(tape, net.project_inputs(tape, v.visual, v.audio, v.caption, v.caption_empty), {}, {});
  EXPECT_THROW(net.classify_branch(tape, enc.fused, Branch::kVisual), Error);
}

TEST(Network, EveryModalitySubsetRuns) {
  std::mt19937_64 rng(13);
  for (const char* m : {"A", "V", "C", "A&V", "A&C", "V&C", "A&V&C"}) {
    auto cfg = small_config();
    cfg.modalities = ModalitySet::parse(m);
    Network net(cfg, 10);
    const auto out = net.predict(random_video(9, cfg.input_dims, rng));
    EXPECT_EQ(out.size(), 9u) << m;
    EXPECT_EQ(out.branch_heads, cfg.modalities.has_branch_heads());
  }
}

TEST(Network, InputWidthMismatchIsShapeError) {
  std::mt19937_64 rng(14);
  Network net(small_config(), 1);
  EXPECT_THROW(net.predict(random_video(5, {13, 16, 8}, rng)), Error);
}

TEST(Checkpoint, RoundTripPreservesPredictions) {
  std::mt19937_64 rng(15);
  const auto dir = testing::scratch_dir("ckpt");
  Network net(small_config(), 11);
  const auto v = random_video(10, small_config().input_dims, rng);
  write_checkpoint(dir / "m.ckpt", snapshot(net, {{"epoch", 3}}));
  EXPECT_FALSE(fs::exists(dir / "m.ckpt.tmp"));
  const Checkpoint back = read_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.kind, "network");
  EXPECT_EQ(back.model, small_config());
  EXPECT_EQ(back.metadata["epoch"], 3);
  Network restored = instantiate(back);
  EXPECT_EQ(max_output_diff(net.predict(v), restored.predict(v)), 0.0);
  EXPECT_EQ(train::parameter_checksum(net), train::parameter_checksum(restored));
}

TEST(Checkpoint, CorruptionAndMismatch) {
  const auto dir = testing::scratch_dir("ckpt_bad");
  Network net(small_config(), 12);
  write_checkpoint(dir / "m.ckpt", snapshot(net));
  const auto size = fs::file_size(dir / "m.ckpt");
  fs::copy_file(dir / "m.ckpt", dir / "short.ckpt");
  fs::resize_file(dir / "short.ckpt", size - 7);
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInvalidArgument;
  };
  EXPECT_EQ(code([&] { read_checkpoint(dir / "short.ckpt"); }), Errc::kCorruptContainer);
  EXPECT_EQ(code([&] { read_checkpoint(dir / "absent.ckpt"); }), Errc::kIoError);
  {
    std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  }
  EXPECT_EQ(code([&] { read_checkpoint(dir / "junk.ckpt"); }), Errc::kCorruptContainer);

  auto wider = small_config({20, 16, 8});
  Network other(wider, 1);
  EXPECT_EQ(code([&] { restore(other, snapshot(net)); }), Errc::kConfigMismatch);
  try {
    require_compatible(small_config(), {20, 16, 8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kConfigMismatch);
    const std::string what = e.what();
    EXPECT_NE(what.find("12"), std::string::npos);
    EXPECT_NE(what.find("20"), std::string::npos);
  }
  EXPECT_NO_THROW(require_compatible(small_config(), {12, 16, 8}));
}

}  // namespace
}  // namespace repurpose::model
