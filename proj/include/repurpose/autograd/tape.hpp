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
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "repurpose/tensor/matrix.hpp"

namespace repurpose::autograd {

/// Trainable array with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void zero_grad() { grad = Matrix(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode recording of matrix operations for one forward pass.
/// A tape is single-threaded; build one per forward pass.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(bool record_gradients = true) : recording_(record_gradients) {}

  bool recording() const noexcept { return recording_; }

  Var constant(Matrix value);
  /// Leaf that receives a gradient without being a parameter.
  Var leaf(Matrix value);
  /// Leaf aliasing `param.value`; gradients are added to `param.grad`.
  Var parameter(Parameter& param);

  const Matrix& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradient of a node after backward(); zero matrix if none flowed.
  const Matrix& grad(Var v);

  /// Runs the reverse sweep from the given (node, d loss / d node) seeds.
  void backward(std::span<const std::pair<Var, Matrix>> seeds);

  // Interface used by operations.
  Var record(Matrix value, bool requires_grad, BackwardFn backward);
  Matrix& grad_buffer(std::size_t id);
  const Matrix& value_of(std::size_t id) const { return value(Var{id}); }
  bool needs_grad(Var v) const { return recording_ && nodes_[v.id].requires_grad; }

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  bool recording_;
  std::vector<Node> nodes_;
};

// Operations. Shapes are [rows x cols]; sequences run along rows.

/// x [n x in] * w [in x out] + b [1 x out]
Var linear(Tape& tape, Var x, Var w, Var b);
Var add(Tape& tape, Var a, Var b);
Var add_constant(Tape& tape, Var a, const Matrix& c);
Var relu(Tape& tape, Var x);
Var scale(Tape& tape, Var x, float factor);
Var layer_norm(Tape& tape, Var x, Var gamma, Var beta, float eps = 1e-5f);
Var concat_cols(Tape& tape, std::span<const Var> parts);
/// Rows flagged in `flags` are replaced by the single-row `row`.
Var replace_rows(Tape& tape, Var x, std::span<const std::uint8_t> flags, Var row);
/// Inverted dropout; identity when rate == 0 or rng is null.
Var dropout(Tape& tape, Var x, float rate, std::mt19937_64* rng);

/// Multi-head scaled dot-product attention on already projected queries
/// [nq x d], keys and values [nk x d]. `key_valid`, when non-empty, masks
/// out keys whose flag is 0; every query row must see at least one key.
Var attention(Tape& tape, Var q, Var k, Var v, std::size_t heads,
              std::span<const std::uint8_t> key_valid);

}  // namespace repurpose::autograd
