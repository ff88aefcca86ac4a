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

// NEON kernels for AArch64, where Advanced SIMD is always present.
#include "repurpose/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace repurpose::simd::detail {
namespace {

void transpose_into(const float* src, std::size_t rows, std::size_t cols, std::size_t ld,
                    std::vector<float>& dst) {
  dst.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * ld + c];
  }
}

inline void store_scaled(float* c, float32x4_t acc, float alpha, float beta) {
  float32x4_t out = vmulq_n_f32(acc, alpha);
  if (beta != 0.0f) out = vfmaq_n_f32(out, vld1q_f32(c), beta);
  vst1q_f32(c, out);
}

void gemm_neon(const GemmArgs& g) {
  if (g.m == 0 || g.n == 0) return;
  thread_local std::vector<float> packed_a;
  thread_local std::vector<float> packed_b;
  const float* a = g.a;
  std::size_t lda = g.lda;
  if (g.trans_a) {
    transpose_into(g.a, g.k, g.m, g.lda, packed_a);
    a = packed_a.data();
    lda = g.k;
  }
  const float* b = g.b;
  std::size_t ldb = g.ldb;
  if (g.trans_b) {
    transpose_into(g.b, g.n, g.k, g.ldb, packed_b);
    b = packed_b.data();
    ldb = g.n;
  }

  const std::size_t n8 = g.n - g.n % 8;
  for (std::size_t i = 0; i < g.m; ++i) {
    const float* arow = a + i * lda;
    float* crow = g.c + i * g.ldc;
    for (std::size_t j = 0; j < n8; j += 8) {
      float32x4_t acc0 = vdupq_n_f32(0.0f);
      float32x4_t acc1 = vdupq_n_f32(0.0f);
      for (std::size_t p = 0; p < g.k; ++p) {
        const float* brow = b + p * ldb + j;
        acc0 = vfmaq_n_f32(acc0, vld1q_f32(brow), arow[p]);
        acc1 = vfmaq_n_f32(acc1, vld1q_f32(brow + 4), arow[p]);
      }
      store_scaled(crow + j, acc0, g.alpha, g.beta);
      store_scaled(crow + j + 4, acc1, g.alpha, g.beta);
    }
    for (std::size_t j = n8; j < g.n; ++j) {
      float acc = 0.0f;
      for (std::size_t p = 0; p < g.k; ++p) acc += arow[p] * b[p * ldb + j];
      crow[j] = g.beta == 0.0f ? g.alpha * acc : g.alpha * acc + g.beta * crow[j];
    }
  }
}

float dot_neon(const float* x, const float* y, std::size_t n) {
  float32x4_t s = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) s = vfmaq_f32(s, vld1q_f32(x + i), vld1q_f32(y + i));
  float acc = vaddvq_f32(s);
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_neon(float alpha, const float* x, float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vfmaq_n_f32(vld1q_f32(y + i), vld1q_f32(x + i), alpha));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void softmax_neon(float* x, std::size_t n) {
  if (n == 0) return;
  float peak = *std::max_element(x, x + n);
  float total = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::exp(x[i] - peak);
    total += x[i];
  }
  const float32x4_t inv = vdupq_n_f32(1.0f / total);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(x + i, vmulq_f32(vld1q_f32(x + i), inv));
  for (; i < n; ++i) x[i] *= 1.0f / total;
}

constexpr KernelTable kNeonTable{Isa::kNeon, gemm_neon, dot_neon, axpy_neon, softmax_neon};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeonTable; }

}  // namespace repurpose::simd::detail

#else

namespace repurpose::simd::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace repurpose::simd::detail

#endif
