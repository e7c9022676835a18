#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace wibp::kernels {
namespace {

Isa detect_default() {
  if (const char* env = std::getenv("WIBP_ISA")) {
    const Isa requested = parse_isa(env);
    if (requested == Isa::avx2 && !avx2_available()) return Isa::scalar;
    return requested;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{&table(detect_default())};
  return current;
}

}  // namespace

bool avx2_available() {
#if defined(WIBP_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

const KernelTable& table(Isa isa) {
#if defined(WIBP_HAVE_AVX2_TU)
  if (isa == Isa::avx2) {
    if (!avx2_available()) throw std::runtime_error("avx2 kernels requested but not supported by this CPU");
    return detail::avx2_table();
  }
#else
  if (isa == Isa::avx2) throw std::runtime_error("avx2 kernels not compiled into this build");
#endif
  return scalar_table();
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) { slot().store(&table(isa), std::memory_order_release); }

Isa active_isa() { return active().isa; }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw std::invalid_argument("unknown kernel ISA '" + std::string(name) + "'");
}

}  // namespace wibp::kernels
