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
#include <random>
#include <vector>

#include "repurpose/error.hpp"
#include "repurpose/simd/kernels.hpp"

namespace repurpose::simd {
namespace {

std::vector<Isa> vector_variants() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

std::vector<float> random_vec(std::size_t n, std::mt19937_64& rng, float scale = 1.0f) {
  std::normal_distribution<float> g(0.0f, scale);
  std::vector<float> v(n);
  for (float& x : v) x = g(rng);
  return v;
}

TEST(Dispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  EXPECT_EQ(kernels_for(Isa::kScalar).isa, Isa::kScalar);
  EXPECT_EQ(parse_isa("avx2"), Isa::kAvx2);
  EXPECT_EQ(isa_name(Isa::kNeon), "neon");
  EXPECT_THROW(parse_isa("sse9"), Error);
}

TEST(Dispatch, ScopedIsaRestores) {
  const Isa before = active_isa();
  {
    ScopedIsa s(Isa::kScalar);
    EXPECT_EQ(active_isa(), Isa::kScalar);
    EXPECT_EQ(kernels().isa, Isa::kScalar);
  }
  EXPECT_EQ(active_isa(), before);
}

TEST(Dispatch, UnsupportedVariantRejected) {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!isa_supported(isa)) EXPECT_THROW(set_active_isa(isa), Error);
  }
}

struct GemmShape {
  bool ta, tb;
  std::size_t m, n, k;
};

TEST(Equivalence, GemmMatchesScalarAcrossShapesAndTransposes) {
  const auto variants = vector_variants();
  if (variants.empty()) GTEST_SKIP() << "no vector variant on this CPU";
  std::mt19937_64 rng(5);
  std::vector<GemmShape> shapes;
  for (bool ta : {false, true}) {
    for (bool tb : {false, true}) {
      for (std::size_t m : {1, 3, 4, 7, 17}) {
        for (std::size_t n : {1, 5, 16, 17, 40}) {
          for (std::size_t k : {1, 8, 33}) shapes.push_back({ta, tb, m, n, k});
        }
      }
    }
  }
  for (Isa isa : variants) {
    const KernelTable& vec = kernels_for(isa);
    const KernelTable& ref = kernels_for(Isa::kScalar);
    for (const auto& s : shapes) {
      for (float beta : {0.0f, 0.5f}) {
        const auto a = random_vec(s.m * s.k, rng);
        const auto b = random_vec(s.k * s.n, rng);
        auto c_ref = random_vec(s.m * s.n, rng);
        auto c_vec = c_ref;
        GemmArgs args{s.ta, s.tb, s.m, s.n, s.k, 1.3f, a.data(), s.ta ? s.m : s.k, b.data(), s.tb ? s.k : s.n,
                      beta, c_ref.data(), s.n};
        ref.gemm(args);
        args.c = c_vec.data();
        vec.gemm(args);
        for (std::size_t i = 0; i < c_ref.size(); ++i) {
          ASSERT_NEAR(c_vec[i], c_ref[i], 1e-4f * (1.0f + std::abs(c_ref[i])))
              << isa_name(isa) << " m=" << s.m << " n=" << s.n << " k=" << s.k << " ta=" << s.ta
              << " tb=" << s.tb;
        }
      }
    }
  }
}

TEST(Equivalence, BetaZeroIgnoresGarbage) {
  std::mt19937_64 rng(6);
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (!isa_supported(isa)) continue;
    const auto a = random_vec(6 * 5, rng);
    const auto b = random_vec(5 * 9, rng);
    std::vector<float> c(6 * 9, std::nanf(""));
    kernels_for(isa).gemm({false, false, 6, 9, 5, 1.0f, a.data(), 5, b.data(), 9, 0.0f, c.data(), 9});
    for (float x : c) ASSERT_TRUE(std::isfinite(x)) << isa_name(isa);
  }
}

TEST(Equivalence, DotAxpySoftmax) {
  const auto variants = vector_variants();
  if (variants.empty()) GTEST_SKIP() << "no vector variant on this CPU";
  std::mt19937_64 rng(7);
  const KernelTable& ref = kernels_for(Isa::kScalar);
  for (Isa isa : variants) {
    const KernelTable& vec = kernels_for(isa);
    for (std::size_t n : {0, 1, 3, 7, 8, 9, 15, 16, 31, 64, 100, 1000}) {
      const auto x = random_vec(n, rng);
      const auto y = random_vec(n, rng);
      const float d_ref = ref.dot(x.data(), y.data(), n);
      EXPECT_NEAR(vec.dot(x.data(), y.data(), n), d_ref, 1e-4f * (1.0f + std::sqrt(static_cast<float>(n))));

      auto y_ref = y;
      auto y_vec = y;
      ref.axpy(-0.7f, x.data(), y_ref.data(), n);
      vec.axpy(-0.7f, x.data(), y_vec.data(), n);
      for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(y_vec[i], y_ref[i], 1e-6f);

      auto s_ref = random_vec(n, rng, 10.0f);
      auto s_vec = s_ref;
      ref.softmax(s_ref.data(), n);
      vec.softmax(s_vec.data(), n);
      float total = 0.0f;
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_NEAR(s_vec[i], s_ref[i], 1e-6f + 1e-5f * s_ref[i]) << isa_name(isa) << " n=" << n;
        total += s_vec[i];
      }
      if (n > 0) EXPECT_NEAR(total, 1.0f, 1e-5f);
    }
  }
}

TEST(Softmax, ExtremeInputsStayFinite) {
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (!isa_supported(isa)) continue;
    std::vector<float> x{-1e4f, 0.0f, 80.0f, 88.0f, -80.0f, 1e4f, 3.0f, 2.0f, 1.0f};
    kernels_for(isa).softmax(x.data(), x.size());
    for (float v : x) ASSERT_TRUE(std::isfinite(v));
    EXPECT_NEAR(x[5], 1.0f, 1e-6f);
  }
}

}  // namespace
}  // namespace repurpose::simd
