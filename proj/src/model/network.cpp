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

#include "repurpose/model/network.hpp"

#include <algorithm>
#include <cmath>

#include "repurpose/error.hpp"

namespace repurpose::model {

using autograd::Tape;
using autograd::Var;

Batch collate(std::span<const VideoSample* const> samples) {
  Batch batch;
  for (const VideoSample* s : samples) batch.padded_length = std::max(batch.padded_length, s->num_segments());
  const std::size_t len = batch.padded_length;
  for (const VideoSample* s : samples) {
    const std::size_t n = s->num_segments();
    if (s->audio.rows() != n || s->caption.rows() != n || s->caption_empty.size() != n) {
      raise(Errc::kShapeMismatch, s->video_id + ": modalities disagree on segment count");
    }
    auto pad = [&](const Matrix& m) {
      Matrix out(len, m.cols());
      std::copy_n(m.data(), m.size(), out.data());
      return out;
    };
    Batch::Item item;
    item.sample = s;
    item.visual = pad(s->visual);
    item.audio = pad(s->audio);
    item.caption = pad(s->caption);
    item.caption_empty.assign(len, 0);
    std::copy(s->caption_empty.begin(), s->caption_empty.end(), item.caption_empty.begin());
    item.valid.assign(len, 0);
    std::fill_n(item.valid.begin(), n, 1);
    item.length = n;
    batch.items.push_back(std::move(item));
  }
  return batch;
}

Matrix sinusoidal_positions(std::size_t length, std::size_t dim) {
  Matrix pe(length, dim);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < dim; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
      pe(t, i) = static_cast<float>(std::sin(static_cast<double>(t) * freq));
      if (i + 1 < dim) pe(t, i + 1) = static_cast<float>(std::cos(static_cast<double>(t) * freq));
    }
  }
  return pe;
}

Network::Network(const ModelConfig& config, std::uint64_t seed) : config_(config), init_rng_(seed) {
  config_.validate();
  const auto& m = config_.modalities;
  const std::size_t d = config_.d_model;
  const std::size_t h = config_.head_hidden;

  if (m.visual) proj_visual_ = make_mlp("proj.visual", {config_.input_dims.visual, d, d});
  if (m.audio) proj_audio_ = make_mlp("proj.audio", {config_.input_dims.audio, d, d});
  if (m.caption) {
    proj_caption_ = make_mlp("proj.caption", {config_.input_dims.caption, d, d});
    empty_caption_ = params_.size();
    params_.push_back({"caption.empty_token", Matrix(1, config_.input_dims.caption), {}});
    std::normal_distribution<float> gauss(0.0f, 0.02f);
    for (float& x : params_.back().value.values()) x = gauss(init_rng_);
  }

  for (std::size_t l = 0; l < config_.n_self_layers; ++l) {
    const std::string tag = "." + std::to_string(l);
    if (m.visual) self_visual_.push_back(make_block("self.visual" + tag, true));
    if (m.audio) self_audio_.push_back(make_block("self.audio" + tag, true));
    if (m.caption) self_caption_.push_back(make_block("self.caption" + tag, true));
  }
  if (m.caption && (m.visual || m.audio)) {
    for (std::size_t l = 0; l < config_.n_caption_layers; ++l) {
      const std::string tag = "." + std::to_string(l);
      if (m.visual) caption_visual_.push_back(make_block("caption.visual" + tag, false));
      if (m.audio) caption_audio_.push_back(make_block("caption.audio" + tag, false));
    }
  }
  if (m.visual && m.audio) {
    for (std::size_t l = 0; l < config_.n_fusion_layers; ++l) {
      const std::string tag = "." + std::to_string(l);
      fusion_visual_.push_back(make_block("fusion.visual" + tag, false));
      fusion_audio_.push_back(make_block("fusion.audio" + tag, false));
    }
  }

  std::size_t streams = 0;
  if (m.visual) {
    final_visual_ = make_norm("final.visual", d);
    ++streams;
  }
  if (m.audio) {
    final_audio_ = make_norm("final.audio", d);
    ++streams;
  }
  if (streams == 0) {
    final_caption_ = make_norm("final.caption", d);
    streams = 1;
  }
  fuse_down_ = make_linear("fuse_down", streams * d, d);

  if (m.has_branch_heads()) {
    head_visual_ = make_mlp("head.visual", {d, h, h, 1});
    head_audio_ = make_mlp("head.audio", {d, h, h, 1});
  }
  head_fused_ = make_mlp("head.fused", {d, h, h, 1});
  head_regression_ = make_mlp("head.regression", {d, h, h, 2});
  // Classifiers start at a 0.01 positive prior; rectified offsets start in
  // their active region.
  const float prior_bias = -std::log(99.0f);
  for (const Mlp* head : {&head_visual_, &head_audio_, &head_fused_}) {
    if (!head->layers.empty()) params_[head->layers.back().b].value.fill(prior_bias);
  }
  params_[head_regression_.layers.back().b].value.fill(1.0f);
}

Network::LinearRef Network::make_linear(const std::string& name, std::size_t in, std::size_t out) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in));
  std::uniform_real_distribution<float> unif(-bound, bound);
  Matrix w(in, out);
  for (float& x : w.values()) x = unif(init_rng_);
  LinearRef ref{params_.size(), params_.size() + 1};
  params_.push_back({name + ".weight", std::move(w), {}});
  params_.push_back({name + ".bias", Matrix(1, out), {}});
  return ref;
}

Network::NormRef Network::make_norm(const std::string& name, std::size_t dim) {
  NormRef ref{params_.size(), params_.size() + 1};
  params_.push_back({name + ".gamma", Matrix(1, dim, 1.0f), {}});
  params_.push_back({name + ".beta", Matrix(1, dim), {}});
  return ref;
}

Network::Block Network::make_block(const std::string& name, bool self_attention) {
  const std::size_t d = config_.d_model;
  Block b{};
  b.self_attention = self_attention;
  b.norm_q = make_norm(name + ".norm_q", d);
  if (!self_attention) b.norm_kv = make_norm(name + ".norm_kv", d);
  b.q = make_linear(name + ".attn.q", d, d);
  b.k = make_linear(name + ".attn.k", d, d);
  b.v = make_linear(name + ".attn.v", d, d);
  b.o = make_linear(name + ".attn.o", d, d);
  b.norm_ff = make_norm(name + ".norm_ff", d);
  b.ff1 = make_linear(name + ".ff1", d, config_.ffn_multiplier * d);
  b.ff2 = make_linear(name + ".ff2", config_.ffn_multiplier * d, d);
  return b;
}

Network::Mlp Network::make_mlp(const std::string& name, std::vector<std::size_t> widths) {
  Mlp mlp;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    mlp.layers.push_back(make_linear(name + "." + std::to_string(i), widths[i], widths[i + 1]));
  }
  return mlp;
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void Network::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void Network::zero_head_outputs() {
  auto zero = [&](const Mlp& mlp) {
    if (mlp.layers.empty()) return;
    params_[mlp.layers.back().w].value.fill(0.0f);
    params_[mlp.layers.back().b].value.fill(0.0f);
  };
  zero(head_visual_);
  zero(head_audio_);
  zero(head_fused_);
  zero(head_regression_);
}

Var Network::apply(Tape& tape, LinearRef l, Var x) {
  return autograd::linear(tape, x, tape.parameter(params_[l.w]), tape.parameter(params_[l.b]));
}

Var Network::apply(Tape& tape, NormRef n, Var x) {
  return autograd::layer_norm(tape, x, tape.parameter(params_[n.gamma]), tape.parameter(params_[n.beta]));
}

Var Network::apply(Tape& tape, const Mlp& mlp, Var x) {
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    x = apply(tape, mlp.layers[i], x);
    if (i + 1 < mlp.layers.size()) x = autograd::relu(tape, x);
  }
  return x;
}

Var Network::apply_block(Tape& tape, const Block& b, Var x, Var context,
                         std::span<const std::uint8_t> valid, const ForwardContext& ctx) {
  const float rate = ctx.training ? config_.dropout : 0.0f;
  const Var xq = apply(tape, b.norm_q, x);
  const Var kv = b.self_attention ? xq : apply(tape, b.norm_kv, context);
  const Var q = apply(tape, b.q, xq);
  const Var k = apply(tape, b.k, kv);
  const Var v = apply(tape, b.v, kv);
  Var attended = autograd::attention(tape, q, k, v, config_.n_heads, valid);
  attended = autograd::dropout(tape, apply(tape, b.o, attended), rate, ctx.rng);
  x = autograd::add(tape, x, attended);

  Var ff = apply(tape, b.norm_ff, x);
  ff = apply(tape, b.ff2, autograd::relu(tape, apply(tape, b.ff1, ff)));
  ff = autograd::dropout(tape, ff, rate, ctx.rng);
  return autograd::add(tape, x, ff);
}

ProjectedInputs Network::project_inputs(Tape& tape, const Matrix& visual, const Matrix& audio,
                                        const Matrix& caption,
                                        std::span<const std::uint8_t> caption_empty) {
  const auto& m = config_.modalities;
  const auto& dims = config_.input_dims;
  std::size_t rows = 0;
  bool have_rows = false;
  auto check = [&](bool used, const Matrix& x, std::size_t width, const char* name) {
    if (!used) return;
    if (x.cols() != width) {
      raise(Errc::kShapeMismatch, std::string(name) + " features have " + std::to_string(x.cols()) +
                                      " columns, model expects " + std::to_string(width));
    }
    if (have_rows && x.rows() != rows) raise(Errc::kShapeMismatch, "modalities disagree on segment count");
    rows = x.rows();
    have_rows = true;
  };
  check(m.visual, visual, dims.visual, "visual");
  check(m.audio, audio, dims.audio, "audio");
  check(m.caption, caption, dims.caption, "caption");

  ProjectedInputs out{};
  if (m.visual) out.visual = apply(tape, proj_visual_, tape.constant(visual));
  if (m.audio) out.audio = apply(tape, proj_audio_, tape.constant(audio));
  if (m.caption) {
    Var c = tape.constant(caption);
    if (!caption_empty.empty()) {
      if (caption_empty.size() != rows) raise(Errc::kShapeMismatch, "caption empty-flag length mismatch");
      c = autograd::replace_rows(tape, c, caption_empty, tape.parameter(params_[empty_caption_]));
    }
    out.caption = apply(tape, proj_caption_, c);
  }
  return out;
}

ProjectedInputs Network::add_positions(Tape& tape, const ProjectedInputs& in) const {
  const auto& m = config_.modalities;
  ProjectedInputs out = in;
  const Var any = m.visual ? in.visual : (m.audio ? in.audio : in.caption);
  const Matrix pe = sinusoidal_positions(tape.value(any).rows(), config_.d_model);
  if (m.visual) out.visual = autograd::add_constant(tape, in.visual, pe);
  if (m.audio) out.audio = autograd::add_constant(tape, in.audio, pe);
  if (m.caption) out.caption = autograd::add_constant(tape, in.caption, pe);
  return out;
}

Encoded Network::encode(Tape& tape, const ProjectedInputs& in, std::span<const std::uint8_t> valid,
                        const ForwardContext& ctx) {
  const auto& m = config_.modalities;
  const std::size_t d = config_.d_model;
  std::size_t rows = 0;
  auto check = [&](bool used, Var x) {
    if (!used) return;
    const Matrix& v = tape.value(x);
    if (v.cols() != d) raise(Errc::kShapeMismatch, "encoder input width " + std::to_string(v.cols()) + " != d_model");
    rows = v.rows();
  };
  check(m.visual, in.visual);
  check(m.audio, in.audio);
  check(m.caption, in.caption);
  if ((m.visual && tape.value(in.visual).rows() != rows) || (m.audio && tape.value(in.audio).rows() != rows) ||
      (m.caption && tape.value(in.caption).rows() != rows)) {
    raise(Errc::kShapeMismatch, "encoder streams disagree on segment count");
  }
  if (!valid.empty() && valid.size() != rows) {
    raise(Errc::kMaskMismatch, "padding mask has " + std::to_string(valid.size()) + " entries for " +
                                   std::to_string(rows) + " segments");
  }

  Var v = in.visual;
  Var a = in.audio;
  Var c = in.caption;
  for (std::size_t l = 0; l < config_.n_self_layers; ++l) {
    if (m.visual) v = apply_block(tape, self_visual_[l], v, v, valid, ctx);
    if (m.audio) a = apply_block(tape, self_audio_[l], a, a, valid, ctx);
    if (m.caption) c = apply_block(tape, self_caption_[l], c, c, valid, ctx);
  }
  for (std::size_t l = 0; l < caption_visual_.size() || l < caption_audio_.size(); ++l) {
    if (m.visual) v = apply_block(tape, caption_visual_[l], v, c, valid, ctx);
    if (m.audio) a = apply_block(tape, caption_audio_[l], a, c, valid, ctx);
  }
  for (std::size_t l = 0; l < fusion_visual_.size(); ++l) {
    const Var v_next = apply_block(tape, fusion_visual_[l], v, a, valid, ctx);
    const Var a_next = apply_block(tape, fusion_audio_[l], a, v, valid, ctx);
    v = v_next;
    a = a_next;
  }

  Encoded out{};
  std::vector<Var> parts;
  if (m.visual) {
    out.visual = apply(tape, final_visual_, v);
    out.has_visual = true;
    parts.push_back(out.visual);
  }
  if (m.audio) {
    out.audio = apply(tape, final_audio_, a);
    out.has_audio = true;
    parts.push_back(out.audio);
  }
  if (parts.empty()) parts.push_back(apply(tape, final_caption_, c));
  const Var joined = parts.size() == 1 ? parts[0] : autograd::concat_cols(tape, parts);
  out.fused = apply(tape, fuse_down_, joined);
  return out;
}

Var Network::classify_branch(Tape& tape, Var features, Branch branch) {
  switch (branch) {
    case Branch::kFused:
      return apply(tape, head_fused_, features);
    case Branch::kVisual:
      if (head_visual_.layers.empty()) raise(Errc::kUnknownBranch, "no visual branch head in this configuration");
      return apply(tape, head_visual_, features);
    case Branch::kAudio:
      if (head_audio_.layers.empty()) raise(Errc::kUnknownBranch, "no audio branch head in this configuration");
      return apply(tape, head_audio_, features);
  }
  raise(Errc::kUnknownBranch, "unknown branch");
}

Var Network::regress_offsets(Tape& tape, Var fused) { return apply(tape, head_regression_, fused); }

HeadOutputs Network::run(Tape& tape, const Batch::Item& item, const ForwardContext& ctx, HeadVars* vars) {
  ProjectedInputs proj = project_inputs(tape, item.visual, item.audio, item.caption, item.caption_empty);
  if (config_.positional_encoding) proj = add_positions(tape, proj);
  const Encoded enc = encode(tape, proj, item.valid, ctx);

  HeadVars hv{};
  hv.branch_heads = config_.modalities.has_branch_heads();
  hv.logit_fused = classify_branch(tape, enc.fused, Branch::kFused);
  hv.logit_visual = hv.branch_heads ? classify_branch(tape, enc.visual, Branch::kVisual) : hv.logit_fused;
  hv.logit_audio = hv.branch_heads ? classify_branch(tape, enc.audio, Branch::kAudio) : hv.logit_fused;
  hv.regression = regress_offsets(tape, enc.fused);
  if (vars != nullptr) *vars = hv;

  const std::size_t n = item.length;
  auto column = [&](Var x, std::size_t col) {
    const Matrix& m = tape.value(x);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = m(t, col);
    return out;
  };
  HeadOutputs h;
  h.logit_fused = column(hv.logit_fused, 0);
  h.logit_visual = column(hv.logit_visual, 0);
  h.logit_audio = column(hv.logit_audio, 0);
  h.raw_start = column(hv.regression, 0);
  h.raw_end = column(hv.regression, 1);
  h.branch_heads = hv.branch_heads;
  h.regression_scale = config_.regression_scale;
  return h;
}

std::vector<ModelOutput> Network::forward(const Batch& batch) {
  std::vector<ModelOutput> outputs;
  outputs.reserve(batch.items.size());
  for (const auto& item : batch.items) {
    Tape tape(false);
    outputs.push_back(activate(run(tape, item, ForwardContext{})));
  }
  return outputs;
}

ModelOutput Network::predict(const VideoSample& sample) {
  const VideoSample* one[] = {&sample};
  return forward(collate(one)).front();
}

}  // namespace repurpose::model
