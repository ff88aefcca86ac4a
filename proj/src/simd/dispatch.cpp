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

#include <atomic>
#include <cstdlib>
#include <string>

#include "repurpose/error.hpp"
#include "repurpose/simd/kernels.hpp"

namespace repurpose::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table_or_null(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar: return &detail::scalar_table();
    case Isa::kAvx2: return detail::avx2_table();
    case Isa::kNeon: return detail::neon_table();
  }
  return nullptr;
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{&kernels_for(detect_isa())};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  raise(Errc::kInvalidArgument, "unknown SIMD variant '" + std::string(name) + "'");
}

bool isa_supported(Isa isa) noexcept { return table_or_null(isa) != nullptr && cpu_has(isa); }

Isa detect_isa() noexcept {
  if (const char* env = std::getenv("REPURPOSE_SIMD")) {
    try {
      const Isa requested = parse_isa(env);
      if (isa_supported(requested)) return requested;
    } catch (const Error&) {
    }
  }
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    raise(Errc::kInvalidArgument,
          "SIMD variant " + std::string(isa_name(isa)) + " is not available on this CPU");
  }
  return *table_or_null(isa);
}

const KernelTable& kernels() noexcept { return *active_slot().load(std::memory_order_relaxed); }

Isa active_isa() noexcept { return kernels().isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa)); }

}  // namespace repurpose::simd
