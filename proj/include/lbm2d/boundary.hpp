#pragma once

// Boundary closures applied while gathering: link-wise bounce-back and the
// Zou-He constant-velocity / constant-pressure reconstructions.

#include <cmath>
#include <cstdint>

#include "lbm2d/descriptors.hpp"
#include "lbm2d/error.hpp"
#include "lbm2d/lattice.hpp"

namespace lbm2d {

/// Pull-scheme bounce-back: when the node upstream of direction i is absent,
/// the gathered f_i is the node's own previous f in the opposite direction.
template <typename T>
T bounce_back_gather(const Pdf9<T>& own_pre, int i) {
  if (i == 0) {
    throw InvalidArgument("the rest direction never bounces back");
  }
  return own_pre[static_cast<std::size_t>(opposite_direction(i))];
}

template <typename T>
struct BcOutcome {
  Pdf9<T> f{};
  T rho{};
  Vec2<T> v{};
};

/// Boundary entry converted to the run's scalar type.
template <typename T>
struct BoundaryValueT {
  BoundaryKind kind = BoundaryKind::Velocity;
  WallOrientation wall = WallOrientation::West;
  T ux{};
  T uy{};
  T rho{1};

  static BoundaryValueT from(const BoundaryValue& b) {
    return {b.kind, b.wall, T(b.velocity.x), T(b.velocity.y), T(b.density)};
  }
};

namespace zou_he {

// Unknown directions per wall: W {1,5,8}, E {3,6,7}, N {4,7,8}, S {2,5,6}.

/// Sum of the distributions that are known at the wall: tangential + rest
/// once, outgoing twice.
template <typename T>
inline T wall_sum(const T* f, WallOrientation wall) {
  switch (wall) {
    case WallOrientation::West: return ((f[0] + f[2]) + f[4]) + T(2) * ((f[3] + f[6]) + f[7]);
    case WallOrientation::East: return ((f[0] + f[2]) + f[4]) + T(2) * ((f[1] + f[5]) + f[8]);
    case WallOrientation::North: return ((f[0] + f[1]) + f[3]) + T(2) * ((f[2] + f[5]) + f[6]);
    case WallOrientation::South: return ((f[0] + f[1]) + f[3]) + T(2) * ((f[4] + f[7]) + f[8]);
  }
  return T(0);
}

/// Overwrites the three unknown distributions so that the node carries
/// (rho, ux, uy).
template <typename T>
inline void reconstruct(T* f, WallOrientation wall, T rho, T ux, T uy) {
  constexpr T kTwoThirds = T(2.0 / 3.0);
  constexpr T kSixth = T(1.0 / 6.0);
  constexpr T kHalf = T(0.5);
  const T jx = rho * ux;
  const T jy = rho * uy;
  switch (wall) {
    case WallOrientation::West: {
      const T d = kHalf * (f[2] - f[4]);
      f[1] = f[3] + kTwoThirds * jx;
      f[5] = ((f[7] - d) + kSixth * jx) + kHalf * jy;
      f[8] = ((f[6] + d) + kSixth * jx) - kHalf * jy;
      break;
    }
    case WallOrientation::East: {
      const T d = kHalf * (f[2] - f[4]);
      f[3] = f[1] - kTwoThirds * jx;
      f[7] = ((f[5] + d) - kSixth * jx) - kHalf * jy;
      f[6] = ((f[8] - d) - kSixth * jx) + kHalf * jy;
      break;
    }
    case WallOrientation::North: {
      const T d = kHalf * (f[1] - f[3]);
      f[4] = f[2] - kTwoThirds * jy;
      f[7] = ((f[5] + d) - kHalf * jx) - kSixth * jy;
      f[8] = ((f[6] - d) + kHalf * jx) - kSixth * jy;
      break;
    }
    case WallOrientation::South: {
      const T d = kHalf * (f[1] - f[3]);
      f[2] = f[4] + kTwoThirds * jy;
      f[5] = ((f[7] - d) + kHalf * jx) + kSixth * jy;
      f[6] = ((f[8] + d) - kHalf * jx) + kSixth * jy;
      break;
    }
  }
}

/// Normal component of u entering the density denominator: W: 1 - ux, E: 1 + ux,
/// N: 1 + uy, S: 1 - uy.
template <typename T>
inline T density_denominator(WallOrientation wall, T ux, T uy) {
  switch (wall) {
    case WallOrientation::West: return T(1) - ux;
    case WallOrientation::East: return T(1) + ux;
    case WallOrientation::North: return T(1) + uy;
    case WallOrientation::South: return T(1) - uy;
  }
  return T(1);
}

/// In-place velocity closure; returns the wall density.
template <typename T>
inline T apply_velocity(T* f, WallOrientation wall, T ux, T uy) {
  const T rho = wall_sum(f, wall) / density_denominator(wall, ux, uy);
  reconstruct(f, wall, rho, ux, uy);
  return rho;
}

/// In-place pressure closure (zero tangential velocity); returns the normal
/// velocity component as a vector.
template <typename T>
inline Vec2<T> apply_pressure(T* f, WallOrientation wall, T rho) {
  const T s = wall_sum(f, wall) / rho;
  Vec2<T> u{T(0), T(0)};
  switch (wall) {
    case WallOrientation::West: u.x = T(1) - s; break;
    case WallOrientation::East: u.x = s - T(1); break;
    case WallOrientation::North: u.y = s - T(1); break;
    case WallOrientation::South: u.y = T(1) - s; break;
  }
  reconstruct(f, wall, rho, u.x, u.y);
  return u;
}

}  // namespace zou_he

/// Constant-velocity closure. Entries of f_known in the three unknown
/// directions are ignored.
template <typename T>
BcOutcome<T> zou_he_velocity(Pdf9<T> f_known, WallOrientation wall, Vec2<T> u_wall) {
  if (!std::isfinite(u_wall.x) || !std::isfinite(u_wall.y) ||
      !(u_wall.x * u_wall.x + u_wall.y * u_wall.y < T(1))) {
    throw InvalidArgument("wall velocity must satisfy |u| < 1");
  }
  if (zou_he::density_denominator(wall, u_wall.x, u_wall.y) == T(0)) {
    throw InvalidArgument("wall-normal velocity of 1 makes the closure singular");
  }
  BcOutcome<T> out;
  out.rho = zou_he::apply_velocity(f_known.data(), wall, u_wall.x, u_wall.y);
  out.v = u_wall;
  out.f = f_known;
  return out;
}

/// Constant-density closure with zero tangential velocity.
template <typename T>
BcOutcome<T> zou_he_pressure(Pdf9<T> f_known, WallOrientation wall, T rho_wall) {
  if (!(rho_wall > T(0)) || !std::isfinite(rho_wall)) {
    throw InvalidArgument("wall density must be positive");
  }
  BcOutcome<T> out;
  out.v = zou_he::apply_pressure(f_known.data(), wall, rho_wall);
  out.rho = rho_wall;
  out.f = f_known;
  return out;
}

/// Applies bounce-back for absent upstream nodes, then the node's Zou-He
/// closure when it carries a boundary value. `gathered` holds f_pre(x - v_i)
/// for present upstream nodes; other entries are ignored.
template <typename T>
inline void resolve_node(T* f, const T* own_pre, NodeType type, std::uint8_t mask,
                         const BoundaryValueT<T>* bv) {
  if (mask != kAllNeighbors) {
    for (int i = 1; i < 9; ++i) {
      // upstream of i is the neighbour in direction opp(i)
      const int o = d2q9::kOpposite[static_cast<std::size_t>(i)];
      if (!neighbor_present(mask, o)) f[i] = own_pre[o];
    }
  }
  if (type == NodeType::VelocityBC) {
    zou_he::apply_velocity(f, bv->wall, bv->ux, bv->uy);
  } else if (type == NodeType::PressureBC) {
    zou_he::apply_pressure(f, bv->wall, bv->rho);
  }
}

/// Public form of resolve_node over a descriptor entry and the geometry's table.
template <typename T>
Pdf9<T> resolve_boundary(NodeType type, std::uint8_t mask, std::int32_t bc_index,
                         const Pdf9<T>& own_pre, Pdf9<T> gathered,
                         const BoundaryValueTable& table) {
  if (type == NodeType::Solid) {
    throw InvalidArgument("solid nodes carry no closure");
  }
  BoundaryValueT<T> bv{};
  if (is_boundary_value_node(type)) {
    if (bc_index < 0 || static_cast<std::size_t>(bc_index) >= table.size()) {
      throw InvalidArgument("boundary index does not resolve");
    }
    bv = BoundaryValueT<T>::from(table[static_cast<std::size_t>(bc_index)]);
  }
  resolve_node(gathered.data(), own_pre.data(), type, mask, &bv);
  return gathered;
}

}  // namespace lbm2d
