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
#include <random>
#include <span>
#include <vector>

#include "repurpose/autograd/tape.hpp"
#include "repurpose/core/video.hpp"
#include "repurpose/model/config.hpp"
#include "repurpose/model/output.hpp"

namespace repurpose::model {

/// Videos padded to a common length. Rows past each video's length are
/// zero and masked out of attention.
struct Batch {
  struct Item {
    const VideoSample* sample = nullptr;
    Matrix visual;
    Matrix audio;
    Matrix caption;
    std::vector<std::uint8_t> caption_empty;
    std::vector<std::uint8_t> valid;  // 1 for real segments
    std::size_t length = 0;
  };
  std::vector<Item> items;
  std::size_t padded_length = 0;
};

Batch collate(std::span<const VideoSample* const> samples);

struct ForwardContext {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // dropout source, training only
};

struct ProjectedInputs {
  autograd::Var visual;
  autograd::Var audio;
  autograd::Var caption;
};

struct Encoded {
  autograd::Var fused;
  autograd::Var visual;  // post-fusion streams; absent when unused
  autograd::Var audio;
  bool has_visual = false;
  bool has_audio = false;
};

/// Tape handles of one video's head outputs, for seeding backward.
struct HeadVars {
  autograd::Var logit_visual;
  autograd::Var logit_audio;
  autograd::Var logit_fused;
  autograd::Var regression;  // [T x 2], pre-rectifier
  bool branch_heads = false;
};

/// Projections, caption-enhanced encoder and the prediction heads.
class Network {
 public:
  Network(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  std::vector<autograd::Parameter>& parameters() noexcept { return params_; }
  const std::vector<autograd::Parameter>& parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept;
  void zero_grad();

  /// Two-layer perceptron per modality into d_model. Rows flagged in
  /// `caption_empty` take the learned empty-caption embedding first.
  ProjectedInputs project_inputs(autograd::Tape& tape, const Matrix& visual, const Matrix& audio,
                                 const Matrix& caption,
                                 std::span<const std::uint8_t> caption_empty);

  /// Adds sinusoidal position encodings to every projected stream.
  ProjectedInputs add_positions(autograd::Tape& tape, const ProjectedInputs& in) const;

  /// Self-attention per stream, caption cross-attention, audio-visual
  /// fusion, then concatenation and down-projection. `valid` marks real
  /// (unpadded) rows; empty means all rows are real.
  Encoded encode(autograd::Tape& tape, const ProjectedInputs& in,
                 std::span<const std::uint8_t> valid, const ForwardContext& ctx);

  /// [T x 1] logits of the branch's three-layer head.
  autograd::Var classify_branch(autograd::Tape& tape, autograd::Var features, Branch branch);
  /// [T x 2] pre-rectifier start/end outputs.
  autograd::Var regress_offsets(autograd::Tape& tape, autograd::Var fused);

  /// Full pass over one padded item. Returns head outputs cropped to the
  /// item's real length.
  HeadOutputs run(autograd::Tape& tape, const Batch::Item& item, const ForwardContext& ctx,
                  HeadVars* vars = nullptr);

  /// Inference over a batch; dropout off, padding stripped.
  std::vector<ModelOutput> forward(const Batch& batch);
  ModelOutput predict(const VideoSample& sample);

  /// Zeroes the last layer of every head, making probabilities 0.5 and
  /// offsets 0.
  void zero_head_outputs();

 private:
  struct LinearRef {
    std::size_t w;
    std::size_t b;
  };
  struct NormRef {
    std::size_t gamma;
    std::size_t beta;
  };
  struct Block {
    NormRef norm_q;
    NormRef norm_kv;  // unused for self-attention
    LinearRef q, k, v, o;
    NormRef norm_ff;
    LinearRef ff1, ff2;
    bool self_attention;
  };
  struct Mlp {
    std::vector<LinearRef> layers;
  };

  LinearRef make_linear(const std::string& name, std::size_t in, std::size_t out);
  NormRef make_norm(const std::string& name, std::size_t dim);
  Block make_block(const std::string& name, bool self_attention);
  Mlp make_mlp(const std::string& name, std::vector<std::size_t> widths);

  autograd::Var apply(autograd::Tape& tape, LinearRef l, autograd::Var x);
  autograd::Var apply(autograd::Tape& tape, NormRef n, autograd::Var x);
  autograd::Var apply(autograd::Tape& tape, const Mlp& mlp, autograd::Var x);
  autograd::Var apply_block(autograd::Tape& tape, const Block& block, autograd::Var x,
                            autograd::Var context, std::span<const std::uint8_t> valid,
                            const ForwardContext& ctx);

  ModelConfig config_;
  std::mt19937_64 init_rng_;
  std::vector<autograd::Parameter> params_;

  Mlp proj_visual_, proj_audio_, proj_caption_;
  std::size_t empty_caption_ = 0;
  std::vector<Block> self_visual_, self_audio_, self_caption_;
  std::vector<Block> caption_visual_, caption_audio_;
  std::vector<Block> fusion_visual_, fusion_audio_;
  NormRef final_visual_{}, final_audio_{}, final_caption_{};
  LinearRef fuse_down_{};
  Mlp head_visual_, head_audio_, head_fused_, head_regression_;
};

/// Sinusoidal table [length x dim].
Matrix sinusoidal_positions(std::size_t length, std::size_t dim);

}  // namespace repurpose::model
