// Compiled with -mavx2 (no -mfma). Only called after a runtime CPU check.

#include <immintrin.h>

#include "lbm2d/kernels/collide.hpp"
#include "lbm2d/kernels/dispatch.hpp"

namespace lbm2d::kernels {

namespace {

struct Avx2Double {
  using T = double;
  using V = __m256d;
  static constexpr std::size_t kWidth = 4;
  static V load(const T* p) { return _mm256_loadu_pd(p); }
  static void store(T* p, V v) { _mm256_storeu_pd(p, v); }
  static V set1(T a) { return _mm256_set1_pd(a); }
  static V add(V a, V b) { return _mm256_add_pd(a, b); }
  static V sub(V a, V b) { return _mm256_sub_pd(a, b); }
  static V mul(V a, V b) { return _mm256_mul_pd(a, b); }
  static V div(V a, V b) { return _mm256_div_pd(a, b); }
  static V neg(V a) { return _mm256_xor_pd(a, _mm256_set1_pd(-0.0)); }
  // lanes where a != 0 (unordered counts as not-equal, like scalar !=)
  static V nonzero(V a) { return _mm256_cmp_pd(a, _mm256_setzero_pd(), _CMP_NEQ_UQ); }
  static V and_(V m, V a) { return _mm256_and_pd(m, a); }
};

struct Avx2Float {
  using T = float;
  using V = __m256;
  static constexpr std::size_t kWidth = 8;
  static V load(const T* p) { return _mm256_loadu_ps(p); }
  static void store(T* p, V v) { _mm256_storeu_ps(p, v); }
  static V set1(T a) { return _mm256_set1_ps(a); }
  static V add(V a, V b) { return _mm256_add_ps(a, b); }
  static V sub(V a, V b) { return _mm256_sub_ps(a, b); }
  static V mul(V a, V b) { return _mm256_mul_ps(a, b); }
  static V div(V a, V b) { return _mm256_div_ps(a, b); }
  static V neg(V a) { return _mm256_xor_ps(a, _mm256_set1_ps(-0.0f)); }
  static V nonzero(V a) { return _mm256_cmp_ps(a, _mm256_setzero_ps(), _CMP_NEQ_UQ); }
  static V and_(V m, V a) { return _mm256_and_ps(m, a); }
};

template <typename S>
void run_simd(const typename S::T* const* src, typename S::T* const* dst, std::size_t n,
              typename S::T omega) {
  using T = typename S::T;
  using V = typename S::V;
  const V one = S::set1(T(1));
  const V three = S::set1(T(3));
  const V four_half = S::set1(T(4.5));
  const V one_half = S::set1(T(1.5));
  const V w0 = S::set1(d2q9::kW0<T>);
  const V w1 = S::set1(d2q9::kW1<T>);
  const V w5 = S::set1(d2q9::kW5<T>);
  const V om = S::set1(omega);

  auto relax = [&](V fi, V r, V t, V cu) {
    const V feq = S::mul(r, S::add(t, S::mul(cu, S::add(three, S::mul(four_half, cu)))));
    return S::sub(fi, S::mul(om, S::sub(fi, feq)));
  };

  std::size_t k = 0;
  for (; k + S::kWidth <= n; k += S::kWidth) {
    const V f0 = S::load(src[0] + k);
    const V f1 = S::load(src[1] + k);
    const V f2 = S::load(src[2] + k);
    const V f3 = S::load(src[3] + k);
    const V f4 = S::load(src[4] + k);
    const V f5 = S::load(src[5] + k);
    const V f6 = S::load(src[6] + k);
    const V f7 = S::load(src[7] + k);
    const V f8 = S::load(src[8] + k);

    const V rho = S::add(S::add(f0, S::add(S::add(f1, f3), S::add(f2, f4))),
                         S::add(S::add(f5, f7), S::add(f6, f8)));
    const V jx = S::sub(S::add(S::add(f1, f5), f8), S::add(S::add(f3, f6), f7));
    const V jy = S::sub(S::add(S::add(f2, f5), f6), S::add(S::add(f4, f7), f8));
    const V valid = S::nonzero(rho);
    const V ux = S::and_(valid, S::div(jx, rho));
    const V uy = S::and_(valid, S::div(jy, rho));

    const V t = S::sub(one, S::mul(one_half, S::add(S::mul(ux, ux), S::mul(uy, uy))));
    const V r0 = S::mul(w0, rho);
    const V r1 = S::mul(w1, rho);
    const V r5 = S::mul(w5, rho);
    const V upv = S::add(ux, uy);
    const V vmu = S::sub(uy, ux);
    const V umv = S::sub(ux, uy);

    S::store(dst[0] + k, S::sub(f0, S::mul(om, S::sub(f0, S::mul(r0, t)))));
    S::store(dst[1] + k, relax(f1, r1, t, ux));
    S::store(dst[2] + k, relax(f2, r1, t, uy));
    S::store(dst[3] + k, relax(f3, r1, t, S::neg(ux)));
    S::store(dst[4] + k, relax(f4, r1, t, S::neg(uy)));
    S::store(dst[5] + k, relax(f5, r5, t, upv));
    S::store(dst[6] + k, relax(f6, r5, t, vmu));
    S::store(dst[7] + k, relax(f7, r5, t, S::neg(upv)));
    S::store(dst[8] + k, relax(f8, r5, t, umv));
  }

  T f[9];
  for (; k < n; ++k) {
    for (int i = 0; i < 9; ++i) f[i] = src[i][k];
    collide_node(f, omega);
    for (int i = 0; i < 9; ++i) dst[i][k] = f[i];
  }
}

}  // namespace

void run_avx2(const float* const* src, float* const* dst, std::size_t n, float omega) {
  run_simd<Avx2Float>(src, dst, n, omega);
}

void run_avx2(const double* const* src, double* const* dst, std::size_t n, double omega) {
  run_simd<Avx2Double>(src, dst, n, omega);
}

}  // namespace lbm2d::kernels
