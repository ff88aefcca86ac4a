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

// Portable reference kernels. Every vectorized variant is tested against
// these.
#include <algorithm>
#include <cmath>

#include "repurpose/simd/kernels.hpp"

namespace repurpose::simd::detail {
namespace {

void gemm_scalar(const GemmArgs& g) {
  for (std::size_t i = 0; i < g.m; ++i) {
    float* crow = g.c + i * g.ldc;
    for (std::size_t j = 0; j < g.n; ++j) {
      float acc = 0.0f;
      for (std::size_t p = 0; p < g.k; ++p) {
        const float a = g.trans_a ? g.a[p * g.lda + i] : g.a[i * g.lda + p];
        const float b = g.trans_b ? g.b[j * g.ldb + p] : g.b[p * g.ldb + j];
        acc += a * b;
      }
      crow[j] = g.beta == 0.0f ? g.alpha * acc : g.alpha * acc + g.beta * crow[j];
    }
  }
}

float dot_scalar(const float* x, const float* y, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void softmax_scalar(float* x, std::size_t n) {
  if (n == 0) return;
  const float peak = *std::max_element(x, x + n);
  float total = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::exp(x[i] - peak);
    total += x[i];
  }
  const float inv = 1.0f / total;
  for (std::size_t i = 0; i < n; ++i) x[i] *= inv;
}

constexpr KernelTable kScalarTable{Isa::kScalar, gemm_scalar, dot_scalar, axpy_scalar,
                                   softmax_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalarTable; }

}  // namespace repurpose::simd::detail
