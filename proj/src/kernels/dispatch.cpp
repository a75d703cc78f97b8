// Copyright 2026 The tvflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tvflow/kernels.hpp"

namespace tvflow::kernels {
namespace {

const KernelTable* resolve(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  if (name == "auto" || name.empty()) {
    const KernelTable* simd = avx2_table();
    return simd != nullptr ? simd : &scalar_table();
  }
  return nullptr;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table = [] {
    const char* env = std::getenv("TVFLOW_KERNELS");
    const KernelTable* t = resolve(env != nullptr ? std::string_view(env) : std::string_view());
    return t != nullptr ? t : resolve("auto");
  }();
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = resolve(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace tvflow::kernels
