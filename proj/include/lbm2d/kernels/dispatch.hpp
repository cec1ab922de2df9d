#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace lbm2d::kernels {

/// Stream-collide over a run of n consecutive interior Fluid nodes.
/// src[i] points at f_i^pre of the upstream node (x - v_i) of the first node;
/// dst[i] at f_i^post of the first node. Both stay contiguous for the run.
template <typename T>
using RunKernel = void (*)(const T* const* src, T* const* dst, std::size_t n, T omega);

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view s);

bool isa_available(Isa isa);

/// Widest available ISA, unless LBM2D_KERNEL=scalar|avx2 overrides it.
Isa default_isa();

template <typename T>
RunKernel<T> run_kernel(Isa isa);

// Individual variants, exposed for the equivalence tests.
void run_scalar(const float* const* src, float* const* dst, std::size_t n, float omega);
void run_scalar(const double* const* src, double* const* dst, std::size_t n, double omega);
#if defined(LBM2D_HAVE_AVX2)
void run_avx2(const float* const* src, float* const* dst, std::size_t n, float omega);
void run_avx2(const double* const* src, double* const* dst, std::size_t n, double omega);
#endif

}  // namespace lbm2d::kernels
