#include <cstdlib>
#include <string>

#include "pmsz/errors.hpp"
#include "pmsz/simd/kernels.hpp"

namespace pmsz::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa detect_isa() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &detail::kScalarTable;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (detect_isa() == Isa::Avx2) return &detail::kAvx2Table;
#endif
      return nullptr;
  }
  return nullptr;
}

namespace {

const KernelTable& choose() {
  if (const char* env = std::getenv("PMSZ_ISA")) {
    const std::string want(env);
    if (want == "scalar") return detail::kScalarTable;
    if (want == "avx2") {
      if (const KernelTable* t = kernels_for(Isa::Avx2)) return *t;
      throw InputError("PMSZ_ISA=avx2 but this CPU lacks AVX2");
    }
    if (!want.empty()) throw InputError("unknown PMSZ_ISA value '" + want + "'");
  }
  return *kernels_for(detect_isa());
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace pmsz::simd
