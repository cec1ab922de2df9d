#pragma once

// D2Q9 lattice: constants, moments, equilibrium, BGK relaxation and the
// viscosity / Reynolds-number conversions. No storage or geometry here.

/* Direction numbering:

     6   2   5
       \ | /
     3 - 0 - 1
       / | \
     7   4   8
*/

#include <array>
#include <cmath>
#include <cstddef>

#include "lbm2d/error.hpp"

namespace lbm2d {

template <typename T>
struct Vec2 {
  T x{};
  T y{};
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

template <typename T>
using Pdf9 = std::array<T, 9>;

namespace d2q9 {

inline constexpr int kDim = 2;
inline constexpr int kQ = 9;
inline constexpr double kDx = 1.0;
inline constexpr double kDt = 1.0;

inline constexpr std::array<int, 9> kVx{0, 1, 0, -1, 0, 1, -1, -1, 1};
inline constexpr std::array<int, 9> kVy{0, 0, 1, 0, -1, 1, 1, -1, -1};
inline constexpr std::array<int, 9> kOpposite{0, 3, 4, 1, 2, 7, 8, 5, 6};

// Weights as exact rationals (numerator / 36).
inline constexpr std::array<int, 9> kWeightNum36{16, 4, 4, 4, 4, 1, 1, 1, 1};

template <typename T>
inline constexpr T kW0 = T(4.0 / 9.0);
template <typename T>
inline constexpr T kW1 = T(1.0 / 9.0);
template <typename T>
inline constexpr T kW5 = T(1.0 / 36.0);

template <typename T>
inline constexpr std::array<T, 9> kWeights{kW0<T>, kW1<T>, kW1<T>, kW1<T>, kW1<T>,
                                           kW5<T>, kW5<T>, kW5<T>, kW5<T>};

}  // namespace d2q9

/// Index of the direction with v_j = -v_i.
constexpr int opposite_direction(int i) {
  if (i < 0 || i >= d2q9::kQ) {
    throw InvalidArgument("direction index out of range: " + std::to_string(i));
  }
  return d2q9::kOpposite[static_cast<std::size_t>(i)];
}

namespace detail {

template <typename T>
void require_finite(T v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidArgument(std::string("non-finite ") + what);
  }
}

}  // namespace detail

/// Local equilibrium f_i^eq(rho, v) for all nine directions.
template <typename T>
Pdf9<T> equilibrium(T rho, Vec2<T> v) {
  detail::require_finite(rho, "density");
  detail::require_finite(v.x, "velocity");
  detail::require_finite(v.y, "velocity");
  const T usq = v.x * v.x + v.y * v.y;
  Pdf9<T> feq{};
  for (std::size_t i = 0; i < 9; ++i) {
    const T cu = T(d2q9::kVx[i]) * v.x + T(d2q9::kVy[i]) * v.y;
    feq[i] = d2q9::kWeights<T>[i] * rho *
             (T(1) + T(3) * cu + T(4.5) * cu * cu - T(1.5) * usq);
  }
  return feq;
}

template <typename T>
struct Moments {
  T rho{};
  Vec2<T> v{};
};

/// Density and velocity of a distribution set; zero density yields zero velocity.
template <typename T>
Moments<T> moments(const Pdf9<T>& f) {
  T rho = 0;
  T jx = 0;
  T jy = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    detail::require_finite(f[i], "distribution");
    rho += f[i];
    jx += T(d2q9::kVx[i]) * f[i];
    jy += T(d2q9::kVy[i]) * f[i];
  }
  if (rho == T(0)) {
    return {rho, {T(0), T(0)}};
  }
  return {rho, {jx / rho, jy / rho}};
}

/// f_i - omega (f_i - f_i^eq(rho, v)).
template <typename T>
Pdf9<T> bgk_collide(const Pdf9<T>& f, T rho, Vec2<T> v, T omega) {
  detail::require_finite(omega, "collision frequency");
  const Pdf9<T> feq = equilibrium(rho, v);
  Pdf9<T> out{};
  for (std::size_t i = 0; i < 9; ++i) {
    detail::require_finite(f[i], "distribution");
    out[i] = f[i] - omega * (f[i] - feq[i]);
  }
  return out;
}

inline double omega_from_viscosity(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw InvalidArgument("viscosity must be positive and finite");
  }
  return 1.0 / (3.0 * nu + 0.5);
}

inline double viscosity_from_reynolds(double U, double L, double Re) {
  if (!(U > 0.0) || !(L > 0.0) || !(Re > 0.0) || !std::isfinite(U) || !std::isfinite(L) ||
      !std::isfinite(Re)) {
    throw InvalidArgument("velocity, length and Reynolds number must be positive");
  }
  return U * L / Re;
}

/// Characteristic flow parameters in lattice units.
struct FlowParams {
  double U = 0.0;
  double L = 0.0;
  double Re = 0.0;
  double nu = 0.0;
  double omega = 0.0;

  static FlowParams from_reynolds(double U, double L, double Re) {
    FlowParams p;
    p.U = U;
    p.L = L;
    p.Re = Re;
    p.nu = viscosity_from_reynolds(U, L, Re);
    p.omega = omega_from_viscosity(p.nu);
    return p;
  }

  /// U may be zero (quiescent runs); Re is then reported as zero.
  static FlowParams from_viscosity(double U, double L, double nu) {
    if (!(L > 0.0) || !(U >= 0.0)) {
      throw InvalidArgument("length must be positive and velocity non-negative");
    }
    FlowParams p;
    p.U = U;
    p.L = L;
    p.nu = nu;
    p.omega = omega_from_viscosity(nu);
    p.Re = U * L / nu;
    return p;
  }
};

}  // namespace lbm2d
