#pragma once

// Scalar reference for the fused per-node BGK update. The SIMD variants in
// src/kernels/ repeat this exact operation sequence lane-wise, so the results
// are bitwise identical as long as no FMA contraction is allowed.

#include "lbm2d/lattice.hpp"

namespace lbm2d::kernels {

/// In-place BGK relaxation of one node's nine gathered distributions.
template <typename T>
inline void collide_node(T* f, T omega) {
  const T f0 = f[0], f1 = f[1], f2 = f[2], f3 = f[3], f4 = f[4];
  const T f5 = f[5], f6 = f[6], f7 = f[7], f8 = f[8];

  // pairwise order keeps the rest state exact: rho == 1 bitwise
  const T rho = (f0 + ((f1 + f3) + (f2 + f4))) + ((f5 + f7) + (f6 + f8));
  const T jx = ((f1 + f5) + f8) - ((f3 + f6) + f7);
  const T jy = ((f2 + f5) + f6) - ((f4 + f7) + f8);
  T ux = T(0);
  T uy = T(0);
  if (rho != T(0)) {
    ux = jx / rho;
    uy = jy / rho;
  }

  const T t = T(1) - T(1.5) * (ux * ux + uy * uy);
  const T r0 = d2q9::kW0<T> * rho;
  const T r1 = d2q9::kW1<T> * rho;
  const T r5 = d2q9::kW5<T> * rho;

  auto relax = [omega](T fi, T r, T t_, T cu) {
    const T feq = r * (t_ + cu * (T(3) + T(4.5) * cu));
    return fi - omega * (fi - feq);
  };

  f[0] = f0 - omega * (f0 - r0 * t);
  f[1] = relax(f1, r1, t, ux);
  f[2] = relax(f2, r1, t, uy);
  f[3] = relax(f3, r1, t, -ux);
  f[4] = relax(f4, r1, t, -uy);
  f[5] = relax(f5, r5, t, ux + uy);
  f[6] = relax(f6, r5, t, uy - ux);
  f[7] = relax(f7, r5, t, -(ux + uy));
  f[8] = relax(f8, r5, t, ux - uy);
}

}  // namespace lbm2d::kernels
