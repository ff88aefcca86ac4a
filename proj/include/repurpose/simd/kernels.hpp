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
#include <span>
#include <string_view>

namespace repurpose::simd {

/// Instruction-set variants a kernel table can be built for.
enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

/// Parses "scalar", "avx2" or "neon".
Isa parse_isa(std::string_view name);

/// True when the variant was compiled in and the running CPU supports it.
bool isa_supported(Isa isa) noexcept;

/// Best supported variant, honoring the REPURPOSE_SIMD environment
/// override when it names a supported variant.
Isa detect_isa() noexcept;

Isa active_isa() noexcept;
void set_active_isa(Isa isa);

/// Restores the previously active variant on destruction.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

/// C = alpha * op(A) * op(B) + beta * C on row-major storage, op(A) is
/// m x k and op(B) is k x n. With beta == 0 the prior contents of C are
/// ignored.
struct GemmArgs {
  bool trans_a = false;
  bool trans_b = false;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  float alpha = 1.0f;
  const float* a = nullptr;
  std::size_t lda = 0;
  const float* b = nullptr;
  std::size_t ldb = 0;
  float beta = 0.0f;
  float* c = nullptr;
  std::size_t ldc = 0;
};

struct KernelTable {
  Isa isa;
  void (*gemm)(const GemmArgs& args);
  float (*dot)(const float* x, const float* y, std::size_t n);
  /// y += alpha * x
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  /// In-place numerically stable softmax over n finite values.
  void (*softmax)(float* x, std::size_t n);
};

const KernelTable& kernels_for(Isa isa);
const KernelTable& kernels() noexcept;

inline void gemm(const GemmArgs& args) { kernels().gemm(args); }

inline float dot(std::span<const float> x, std::span<const float> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}

inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

inline void softmax(std::span<float> x) { kernels().softmax(x.data(), x.size()); }

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;
}  // namespace detail

}  // namespace repurpose::simd
