#include "smootherlab/common.hpp"
#include "smootherlab/kernels.hpp"

#include <cstdlib>
#include <string>

namespace smootherlab::kernels {

namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::axpy, &scalar::squared_norm,
                                   &scalar::squared_distance};

#if defined(SMOOTHERLAB_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::axpy, &avx2::squared_norm,
                                 &avx2::squared_distance};
#endif

bool cpu_has_avx2() noexcept {
#if defined(SMOOTHERLAB_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa select_isa() noexcept {
  if (const char* forced = std::getenv("SMOOTHERLAB_SIMD")) {
    if (std::string(forced) == "scalar") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  return isa == Isa::scalar || cpu_has_avx2();
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw ArgumentError("kernel ISA not supported on this CPU: " + std::string(isa_name(isa)));
  }
#if defined(SMOOTHERLAB_HAVE_AVX2_TU)
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

Isa active_isa() noexcept {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() noexcept {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace smootherlab::kernels
