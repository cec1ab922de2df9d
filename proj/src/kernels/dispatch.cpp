#include "lbm2d/kernels/dispatch.hpp"

#include <cstdlib>

namespace lbm2d::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view s) {
  if (s == "scalar") return Isa::Scalar;
  if (s == "avx2") return Isa::Avx2;
  return std::nullopt;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(LBM2D_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa default_isa() {
  if (const char* env = std::getenv("LBM2D_KERNEL")) {
    if (auto isa = parse_isa(env); isa && isa_available(*isa)) return *isa;
  }
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

template <typename T>
RunKernel<T> run_kernel(Isa isa) {
#if defined(LBM2D_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
    return static_cast<RunKernel<T>>(&run_avx2);
  }
#endif
  (void)isa;
  return static_cast<RunKernel<T>>(&run_scalar);
}

template RunKernel<float> run_kernel<float>(Isa);
template RunKernel<double> run_kernel<double>(Isa);

}  // namespace lbm2d::kernels
