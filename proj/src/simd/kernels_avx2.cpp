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

// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma
// and is only reached through the dispatcher after a CPUID check.
#include "repurpose/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <vector>

namespace repurpose::simd::detail {
namespace {

constexpr std::size_t kRowBlock = 4;
constexpr std::size_t kColBlock = 16;

inline __m256i lane_mask(std::size_t valid) {
  const __m256i lanes = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  return _mm256_cmpgt_epi32(_mm256_set1_epi32(static_cast<int>(valid)), lanes);
}

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

inline float hmax(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_max_ps(lo, hi);
  lo = _mm_max_ps(lo, _mm_movehl_ps(lo, lo));
  lo = _mm_max_ss(lo, _mm_movehdup_ps(lo));
  return _mm_cvtss_f32(lo);
}

// Cephes-style exp: range reduction to [-ln2/2, ln2/2] then a degree-5
// polynomial. Relative error stays within a few float ulps on [-87, 88].
inline __m256 exp256(__m256 x) {
  const __m256 hi = _mm256_set1_ps(88.3762626647949f);
  const __m256 lo = _mm256_set1_ps(-88.3762626647949f);
  x = _mm256_min_ps(_mm256_max_ps(x, lo), hi);

  __m256 fx = _mm256_fmadd_ps(x, _mm256_set1_ps(1.44269504088896341f), _mm256_set1_ps(0.5f));
  fx = _mm256_floor_ps(fx);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(0.693359375f), x);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(-2.12194440e-4f), x);

  __m256 y = _mm256_set1_ps(1.9875691500e-4f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(5.0000001201e-1f));
  const __m256 x2 = _mm256_mul_ps(x, x);
  y = _mm256_fmadd_ps(y, x2, x);
  y = _mm256_add_ps(y, _mm256_set1_ps(1.0f));

  __m256i pow2n = _mm256_cvttps_epi32(fx);
  pow2n = _mm256_add_epi32(pow2n, _mm256_set1_epi32(0x7f));
  pow2n = _mm256_slli_epi32(pow2n, 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(pow2n));
}

// Register tile of MR rows by 16 columns over the full depth k. `cols`
// may be below 16 for the right edge, handled with masked loads/stores.
template <std::size_t MR>
void tile(std::size_t k, const float* a, std::size_t lda, const float* b, std::size_t ldb,
          float* c, std::size_t ldc, float alpha, float beta, std::size_t cols) {
  __m256 acc[MR][2];
  for (std::size_t r = 0; r < MR; ++r) acc[r][0] = acc[r][1] = _mm256_setzero_ps();

  const bool full = cols == kColBlock;
  const __m256i m0 = lane_mask(std::min<std::size_t>(cols, 8));
  const __m256i m1 = lane_mask(cols > 8 ? cols - 8 : 0);

  for (std::size_t p = 0; p < k; ++p) {
    const float* brow = b + p * ldb;
    const __m256 b0 = full ? _mm256_loadu_ps(brow) : _mm256_maskload_ps(brow, m0);
    const __m256 b1 = full ? _mm256_loadu_ps(brow + 8) : _mm256_maskload_ps(brow + 8, m1);
    for (std::size_t r = 0; r < MR; ++r) {
      const __m256 av = _mm256_broadcast_ss(a + r * lda + p);
      acc[r][0] = _mm256_fmadd_ps(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_ps(av, b1, acc[r][1]);
    }
  }

  const __m256 va = _mm256_set1_ps(alpha);
  const __m256 vb = _mm256_set1_ps(beta);
  for (std::size_t r = 0; r < MR; ++r) {
    float* crow = c + r * ldc;
    __m256 out0 = _mm256_mul_ps(acc[r][0], va);
    __m256 out1 = _mm256_mul_ps(acc[r][1], va);
    if (full) {
      if (beta != 0.0f) {
        out0 = _mm256_fmadd_ps(vb, _mm256_loadu_ps(crow), out0);
        out1 = _mm256_fmadd_ps(vb, _mm256_loadu_ps(crow + 8), out1);
      }
      _mm256_storeu_ps(crow, out0);
      _mm256_storeu_ps(crow + 8, out1);
    } else {
      if (beta != 0.0f) {
        out0 = _mm256_fmadd_ps(vb, _mm256_maskload_ps(crow, m0), out0);
        out1 = _mm256_fmadd_ps(vb, _mm256_maskload_ps(crow + 8, m1), out1);
      }
      _mm256_maskstore_ps(crow, m0, out0);
      _mm256_maskstore_ps(crow + 8, m1, out1);
    }
  }
}

void transpose_into(const float* src, std::size_t rows, std::size_t cols, std::size_t ld,
                    std::vector<float>& dst) {
  dst.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* s = src + r * ld;
    for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = s[c];
  }
}

void gemm_avx2(const GemmArgs& g) {
  if (g.m == 0 || g.n == 0) return;
  thread_local std::vector<float> packed_a;
  thread_local std::vector<float> packed_b;

  const float* a = g.a;
  std::size_t lda = g.lda;
  if (g.trans_a) {  // stored k x m
    transpose_into(g.a, g.k, g.m, g.lda, packed_a);
    a = packed_a.data();
    lda = g.k;
  }
  const float* b = g.b;
  std::size_t ldb = g.ldb;
  if (g.trans_b) {  // stored n x k
    transpose_into(g.b, g.n, g.k, g.ldb, packed_b);
    b = packed_b.data();
    ldb = g.n;
  }

  for (std::size_t j = 0; j < g.n; j += kColBlock) {
    const std::size_t cols = std::min(kColBlock, g.n - j);
    std::size_t i = 0;
    for (; i + kRowBlock <= g.m; i += kRowBlock) {
      tile<4>(g.k, a + i * lda, lda, b + j, ldb, g.c + i * g.ldc + j, g.ldc, g.alpha, g.beta,
              cols);
    }
    const float* ai = a + i * lda;
    float* ci = g.c + i * g.ldc + j;
    switch (g.m - i) {
      case 3: tile<3>(g.k, ai, lda, b + j, ldb, ci, g.ldc, g.alpha, g.beta, cols); break;
      case 2: tile<2>(g.k, ai, lda, b + j, ldb, ci, g.ldc, g.alpha, g.beta, cols); break;
      case 1: tile<1>(g.k, ai, lda, b + j, ldb, ci, g.ldc, g.alpha, g.beta, cols); break;
      default: break;
    }
  }
}

float dot_avx2(const float* x, const float* y, std::size_t n) {
  __m256 s0 = _mm256_setzero_ps();
  __m256 s1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), s0);
    s1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), s1);
  }
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), s0);
  }
  float acc = hsum(_mm256_add_ps(s0, s1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void softmax_avx2(float* x, std::size_t n) {
  if (n == 0) return;
  std::size_t i = 0;
  __m256 vmax = _mm256_set1_ps(x[0]);
  for (; i + 8 <= n; i += 8) vmax = _mm256_max_ps(vmax, _mm256_loadu_ps(x + i));
  float peak = hmax(vmax);
  for (; i < n; ++i) peak = std::max(peak, x[i]);

  const __m256 vpeak = _mm256_set1_ps(peak);
  __m256 vsum = _mm256_setzero_ps();
  for (i = 0; i + 8 <= n; i += 8) {
    const __m256 e = exp256(_mm256_sub_ps(_mm256_loadu_ps(x + i), vpeak));
    _mm256_storeu_ps(x + i, e);
    vsum = _mm256_add_ps(vsum, e);
  }
  if (i < n) {
    const __m256i m = lane_mask(n - i);
    const __m256 e = exp256(_mm256_sub_ps(_mm256_maskload_ps(x + i, m), vpeak));
    const __m256 masked = _mm256_and_ps(e, _mm256_castsi256_ps(m));
    _mm256_maskstore_ps(x + i, m, masked);
    vsum = _mm256_add_ps(vsum, masked);
  }
  const __m256 inv = _mm256_set1_ps(1.0f / hsum(vsum));
  for (i = 0; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), inv));
  if (i < n) {
    const __m256i m = lane_mask(n - i);
    _mm256_maskstore_ps(x + i, m, _mm256_mul_ps(_mm256_maskload_ps(x + i, m), inv));
  }
}

constexpr KernelTable kAvx2Table{Isa::kAvx2, gemm_avx2, dot_avx2, axpy_avx2, softmax_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2Table; }

}  // namespace repurpose::simd::detail

#else

namespace repurpose::simd::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace repurpose::simd::detail

#endif
