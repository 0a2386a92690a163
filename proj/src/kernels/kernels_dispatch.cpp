#include <atomic>
#include <cstdlib>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"

namespace tfm::kernels {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve_auto() {
  if (avx2_available()) return avx2_ops();
  return &scalar_ops();
}

const Ops* resolve_initial() {
  if (const char* env = std::getenv("TFM_KERNEL_BACKEND")) {
    const std::string name(env);
    if (name == "scalar") return &scalar_ops();
    if (name == "avx2" && avx2_available()) return avx2_ops();
    // Unknown or unsupported request in the environment: fall through to
    // auto rather than aborting startup.
  }
  return resolve_auto();
}

}  // namespace

bool avx2_available() {
  static const bool ok = (avx2_ops() != nullptr) && cpu_has_avx2_fma();
  return ok;
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = resolve_initial();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void set_backend(std::string_view name) {
  if (name == "auto") {
    g_active.store(resolve_auto(), std::memory_order_release);
    return;
  }
  if (name == "scalar") {
    g_active.store(&scalar_ops(), std::memory_order_release);
    return;
  }
  if (name == "avx2") {
    if (!avx2_available()) {
      throw UsageError("avx2 kernel backend not available on this machine");
    }
    g_active.store(avx2_ops(), std::memory_order_release);
    return;
  }
  throw UsageError("unknown kernel backend: " + std::string(name));
}

}  // namespace tfm::kernels
