#include "lbm2d/kernels/collide.hpp"
#include "lbm2d/kernels/dispatch.hpp"

namespace lbm2d::kernels {

namespace {

template <typename T>
void run_scalar_impl(const T* const* src, T* const* dst, std::size_t n, T omega) {
  T f[9];
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < 9; ++i) f[i] = src[i][k];
    collide_node(f, omega);
    for (int i = 0; i < 9; ++i) dst[i][k] = f[i];
  }
}

}  // namespace

void run_scalar(const float* const* src, float* const* dst, std::size_t n, float omega) {
  run_scalar_impl(src, dst, n, omega);
}

void run_scalar(const double* const* src, double* const* dst, std::size_t n, double omega) {
  run_scalar_impl(src, dst, n, omega);
}

}  // namespace lbm2d::kernels
