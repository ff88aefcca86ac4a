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

#include <algorithm>
#include <cmath>
#include <string>

#include "repurpose/autograd/tape.hpp"
#include "repurpose/error.hpp"
#include "repurpose/simd/kernels.hpp"

namespace repurpose::autograd {
namespace {

void require(bool ok, Errc code, const char* what) {
  if (!ok) raise(code, what);
}

std::string shape(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + "]";
}

bool any_grad(const Tape& tape, std::initializer_list<Var> vars) {
  return std::any_of(vars.begin(), vars.end(), [&](Var v) { return tape.needs_grad(v); });
}

// C[m x n] (+)= op(A) op(B), with leading dimensions.
void matmul(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, const float* a,
            std::size_t lda, const float* b, std::size_t ldb, float* c, std::size_t ldc,
            bool accumulate, float alpha = 1.0f) {
  simd::gemm({ta, tb, m, n, k, alpha, a, lda, b, ldb, accumulate ? 1.0f : 0.0f, c, ldc});
}

}  // namespace

Var linear(Tape& tape, Var x, Var w, Var b) {
  const Matrix& xv = tape.value(x);
  const Matrix& wv = tape.value(w);
  const Matrix& bv = tape.value(b);
  if (xv.cols() != wv.rows() || bv.rows() != 1 || bv.cols() != wv.cols()) {
    raise(Errc::kShapeMismatch, "linear: input " + shape(xv) + " weight " + shape(wv) +
                                    " bias " + shape(bv));
  }
  const std::size_t n = xv.rows();
  const std::size_t out = wv.cols();
  Matrix y(n, out);
  for (std::size_t r = 0; r < n; ++r) std::copy_n(bv.data(), out, y.data() + r * out);
  if (n > 0) matmul(false, false, n, out, xv.cols(), xv.data(), xv.cols(), wv.data(), out, y.data(), out, true);

  return tape.record(std::move(y), any_grad(tape, {x, w, b}), [x, w, b](Tape& t, std::size_t self) {
    const Matrix& dy = t.grad_buffer(self);
    const Matrix& xv = t.value(x);
    const Matrix& wv = t.value(w);
    const std::size_t n = xv.rows();
    const std::size_t in = xv.cols();
    const std::size_t out = wv.cols();
    if (n == 0) return;
    if (t.needs_grad(x)) {
      Matrix& dx = t.grad_buffer(x.id);
      matmul(false, true, n, in, out, dy.data(), out, wv.data(), out, dx.data(), in, true);
    }
    if (t.needs_grad(w)) {
      Matrix& dw = t.grad_buffer(w.id);
      matmul(true, false, in, out, n, xv.data(), in, dy.data(), out, dw.data(), out, true);
    }
    if (t.needs_grad(b)) {
      Matrix& db = t.grad_buffer(b.id);
      for (std::size_t r = 0; r < n; ++r) simd::axpy(1.0f, dy.row(r), db.row(0));
    }
  });
}

Var add(Tape& tape, Var a, Var b) {
  const Matrix& av = tape.value(a);
  const Matrix& bv = tape.value(b);
  if (!av.same_shape(bv)) raise(Errc::kShapeMismatch, "add: " + shape(av) + " vs " + shape(bv));
  Matrix y = av;
  simd::axpy(1.0f, bv.values(), y.values());
  return tape.record(std::move(y), any_grad(tape, {a, b}), [a, b](Tape& t, std::size_t self) {
    const Matrix& dy = t.grad_buffer(self);
    if (t.needs_grad(a)) simd::axpy(1.0f, dy.values(), t.grad_buffer(a.id).values());
    if (t.needs_grad(b)) simd::axpy(1.0f, dy.values(), t.grad_buffer(b.id).values());
  });
}

Var add_constant(Tape& tape, Var a, const Matrix& c) {
  const Matrix& av = tape.value(a);
  if (!av.same_shape(c)) raise(Errc::kShapeMismatch, "add_constant: " + shape(av) + " vs " + shape(c));
  Matrix y = av;
  simd::axpy(1.0f, c.values(), y.values());
  return tape.record(std::move(y), tape.needs_grad(a), [a](Tape& t, std::size_t self) {
    simd::axpy(1.0f, t.grad_buffer(self).values(), t.grad_buffer(a.id).values());
  });
}

Var relu(Tape& tape, Var x) {
  Matrix y = tape.value(x);
  for (float& v : y.values()) v = v > 0.0f ? v : 0.0f;
  return tape.record(std::move(y), tape.needs_grad(x), [x](Tape& t, std::size_t self) {
    const auto dy = t.grad_buffer(self).values();
    const auto yv = t.value_of(self).values();
    auto dx = t.grad_buffer(x.id).values();
    for (std::size_t i = 0; i < dy.size(); ++i) {
      if (yv[i] > 0.0f) dx[i] += dy[i];
    }
  });
}

Var scale(Tape& tape, Var x, float factor) {
  Matrix y = tape.value(x);
  for (float& v : y.values()) v *= factor;
  return tape.record(std::move(y), tape.needs_grad(x), [x, factor](Tape& t, std::size_t self) {
    simd::axpy(factor, t.grad_buffer(self).values(), t.grad_buffer(x.id).values());
  });
}

Var layer_norm(Tape& tape, Var x, Var gamma, Var beta, float eps) {
  const Matrix& xv = tape.value(x);
  const Matrix& gv = tape.value(gamma);
  const Matrix& bv = tape.value(beta);
  const std::size_t n = xv.rows();
  const std::size_t d = xv.cols();
  if (gv.rows() != 1 || gv.cols() != d || !gv.same_shape(bv)) {
    raise(Errc::kShapeMismatch, "layer_norm: input " + shape(xv) + " gain " + shape(gv));
  }
  Matrix normalized(n, d);
  std::vector<float> inv_std(n);
  Matrix y(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = xv.row(r);
    double mean = 0.0;
    for (float v : row) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (float v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const float is = static_cast<float>(1.0 / std::sqrt(var + eps));
    inv_std[r] = is;
    auto xh = normalized.row(r);
    auto out = y.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      xh[c] = static_cast<float>(row[c] - mean) * is;
      out[c] = xh[c] * gv(0, c) + bv(0, c);
    }
  }
  return tape.record(
      std::move(y), any_grad(tape, {x, gamma, beta}),
      [x, gamma, beta, normalized = std::move(normalized), inv_std = std::move(inv_std)](
          Tape& t, std::size_t self) {
        const Matrix& dy = t.grad_buffer(self);
        const Matrix& gv = t.value(gamma);
        const std::size_t n = dy.rows();
        const std::size_t d = dy.cols();
        if (t.needs_grad(gamma) || t.needs_grad(beta)) {
          Matrix& dg = t.grad_buffer(gamma.id);
          Matrix& db = t.grad_buffer(beta.id);
          for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
              dg(0, c) += dy(r, c) * normalized(r, c);
              db(0, c) += dy(r, c);
            }
          }
        }
        if (!t.needs_grad(x)) return;
        Matrix& dx = t.grad_buffer(x.id);
        std::vector<float> dxh(d);
        for (std::size_t r = 0; r < n; ++r) {
          double mean_dxh = 0.0;
          double mean_dxh_xh = 0.0;
          for (std::size_t c = 0; c < d; ++c) {
            dxh[c] = dy(r, c) * gv(0, c);
            mean_dxh += dxh[c];
            mean_dxh_xh += dxh[c] * normalized(r, c);
          }
          mean_dxh /= static_cast<double>(d);
          mean_dxh_xh /= static_cast<double>(d);
          for (std::size_t c = 0; c < d; ++c) {
            dx(r, c) += inv_std[r] * static_cast<float>(dxh[c] - mean_dxh -
                                                        normalized(r, c) * mean_dxh_xh);
          }
        }
      });
}

Var concat_cols(Tape& tape, std::span<const Var> parts) {
  require(!parts.empty(), Errc::kShapeMismatch, "concat_cols: no inputs");
  const std::size_t n = tape.value(parts[0]).rows();
  std::size_t total = 0;
  bool tracked = false;
  for (Var p : parts) {
    require(tape.value(p).rows() == n, Errc::kShapeMismatch, "concat_cols: row count differs");
    total += tape.value(p).cols();
    tracked = tracked || tape.needs_grad(p);
  }
  Matrix y(n, total);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Matrix& pv = tape.value(p);
    for (std::size_t r = 0; r < n; ++r) std::copy_n(pv.data() + r * pv.cols(), pv.cols(), y.data() + r * total + offset);
    offset += pv.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.record(std::move(y), tracked, [inputs](Tape& t, std::size_t self) {
    const Matrix& dy = t.grad_buffer(self);
    std::size_t offset = 0;
    for (Var p : inputs) {
      const std::size_t w = t.value(p).cols();
      if (t.needs_grad(p)) {
        Matrix& dp = t.grad_buffer(p.id);
        for (std::size_t r = 0; r < dy.rows(); ++r) {
          simd::axpy(1.0f, dy.row(r).subspan(offset, w), dp.row(r));
        }
      }
      offset += w;
    }
  });
}

Var replace_rows(Tape& tape, Var x, std::span<const std::uint8_t> flags, Var row) {
  const Matrix& xv = tape.value(x);
  const Matrix& rv = tape.value(row);
  if (flags.size() != xv.rows() || rv.rows() != 1 || rv.cols() != xv.cols()) {
    raise(Errc::kShapeMismatch, "replace_rows: input " + shape(xv) + " row " + shape(rv) +
                                    " flags " + std::to_string(flags.size()));
  }
  Matrix y = xv;
  for (std::size_t r = 0; r < flags.size(); ++r) {
    if (flags[r]) std::copy_n(rv.data(), rv.cols(), y.data() + r * y.cols());
  }
  std::vector<std::uint8_t> mask(flags.begin(), flags.end());
  return tape.record(std::move(y), any_grad(tape, {x, row}),
                     [x, row, mask = std::move(mask)](Tape& t, std::size_t self) {
                       const Matrix& dy = t.grad_buffer(self);
                       for (std::size_t r = 0; r < mask.size(); ++r) {
                         if (mask[r] && t.needs_grad(row)) {
                           simd::axpy(1.0f, dy.row(r), t.grad_buffer(row.id).row(0));
                         } else if (!mask[r] && t.needs_grad(x)) {
                           simd::axpy(1.0f, dy.row(r), t.grad_buffer(x.id).row(r));
                         }
                       }
                     });
}

Var dropout(Tape& tape, Var x, float rate, std::mt19937_64* rng) {
  if (rate <= 0.0f || rng == nullptr) return x;
  Matrix y = tape.value(x);
  Matrix keep(y.rows(), y.cols());
  const float scale_kept = 1.0f / (1.0f - rate);
  std::uniform_real_distribution<float> unif(0.0f, 1.0f);
  auto kv = keep.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) {
    kv[i] = unif(*rng) >= rate ? scale_kept : 0.0f;
    yv[i] *= kv[i];
  }
  return tape.record(std::move(y), tape.needs_grad(x),
                     [x, keep = std::move(keep)](Tape& t, std::size_t self) {
                       const auto dy = t.grad_buffer(self).values();
                       auto dx = t.grad_buffer(x.id).values();
                       const auto kv = keep.values();
                       for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * kv[i];
                     });
}

Var attention(Tape& tape, Var q, Var k, Var v, std::size_t heads,
              std::span<const std::uint8_t> key_valid) {
  const Matrix& qv = tape.value(q);
  const Matrix& kv = tape.value(k);
  const Matrix& vv = tape.value(v);
  const std::size_t d = qv.cols();
  if (heads == 0 || d % heads != 0 || kv.cols() != d || !kv.same_shape(vv)) {
    raise(Errc::kShapeMismatch, "attention: q " + shape(qv) + " k " + shape(kv) + " v " +
                                    shape(vv) + " heads " + std::to_string(heads));
  }
  if (!key_valid.empty() && key_valid.size() != kv.rows()) {
    raise(Errc::kMaskMismatch, "attention: mask length " + std::to_string(key_valid.size()) +
                                   " vs " + std::to_string(kv.rows()) + " keys");
  }
  const std::size_t nq = qv.rows();

  // Masked keys are dropped from the computation entirely.
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < kv.rows(); ++r) {
    if (key_valid.empty() || key_valid[r]) keep.push_back(r);
  }
  const bool compact = keep.size() != kv.rows();
  Matrix kc;
  Matrix vc;
  if (compact) {
    kc = Matrix(keep.size(), d);
    vc = Matrix(keep.size(), d);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      std::copy_n(kv.data() + keep[i] * d, d, kc.data() + i * d);
      std::copy_n(vv.data() + keep[i] * d, d, vc.data() + i * d);
    }
  }
  const Matrix& keys = compact ? kc : kv;
  const Matrix& values = compact ? vc : vv;
  const std::size_t nk = keys.rows();
  if (nq > 0 && nk == 0) raise(Errc::kMaskMismatch, "attention: every key is masked");

  const std::size_t dh = d / heads;
  const float inv_sqrt = 1.0f / std::sqrt(static_cast<float>(dh));
  Matrix probs(heads * nq, nk);
  Matrix y(nq, d);
  if (nq > 0) {
    for (std::size_t h = 0; h < heads; ++h) {
      float* ph = probs.data() + h * nq * nk;
      matmul(false, true, nq, nk, dh, qv.data() + h * dh, d, keys.data() + h * dh, d, ph, nk, false, inv_sqrt);
      for (std::size_t r = 0; r < nq; ++r) simd::softmax({ph + r * nk, nk});
      matmul(false, false, nq, dh, nk, ph, nk, values.data() + h * dh, d, y.data() + h * dh, d, false);
    }
  }

  return tape.record(
      std::move(y), any_grad(tape, {q, k, v}),
      [q, k, v, heads, compact, keep = std::move(keep), kc = std::move(kc), vc = std::move(vc),
       probs = std::move(probs)](Tape& t, std::size_t self) {
        const Matrix& dy = t.grad_buffer(self);
        const Matrix& qv = t.value(q);
        const Matrix& keys = compact ? kc : t.value(k);
        const Matrix& values = compact ? vc : t.value(v);
        const std::size_t nq = qv.rows();
        const std::size_t nk = keys.rows();
        const std::size_t d = qv.cols();
        const std::size_t dh = d / heads;
        const float inv_sqrt = 1.0f / std::sqrt(static_cast<float>(dh));
        if (nq == 0) return;

        Matrix dk_local(nk, d);
        Matrix dv_local(nk, d);
        Matrix dscores(nq, nk);
        Matrix* dq = t.needs_grad(q) ? &t.grad_buffer(q.id) : nullptr;
        for (std::size_t h = 0; h < heads; ++h) {
          const float* ph = probs.data() + h * nq * nk;
          const float* dyh = dy.data() + h * dh;
          // dV = P^T dY
          matmul(true, false, nk, dh, nq, ph, nk, dyh, d, dv_local.data() + h * dh, d, false);
          // dP = dY V^T, then the softmax Jacobian row by row.
          matmul(false, true, nq, nk, dh, dyh, d, values.data() + h * dh, d, dscores.data(), nk, false);
          for (std::size_t r = 0; r < nq; ++r) {
            float* ds = dscores.data() + r * nk;
            const float* p = ph + r * nk;
            const float inner = simd::kernels().dot(ds, p, nk);
            for (std::size_t c = 0; c < nk; ++c) ds[c] = p[c] * (ds[c] - inner);
          }
          if (dq != nullptr) {
            matmul(false, false, nq, dh, nk, dscores.data(), nk, keys.data() + h * dh, d, dq->data() + h * dh, d, true, inv_sqrt);
          }
          matmul(true, false, nk, dh, nq, dscores.data(), nk, qv.data() + h * dh, d, dk_local.data() + h * dh, d, false, inv_sqrt);
        }
        auto scatter = [&](Var target, const Matrix& local) {
          if (!t.needs_grad(target)) return;
          Matrix& g = t.grad_buffer(target.id);
          if (!compact) {
            simd::axpy(1.0f, local.values(), g.values());
            return;
          }
          for (std::size_t i = 0; i < keep.size(); ++i) simd::axpy(1.0f, local.row(i), g.row(keep[i]));
        };
        scatter(k, dk_local);
        scatter(v, dv_local);
      });
}

}  // namespace repurpose::autograd
