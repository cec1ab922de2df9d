#pragma once
// Straightforward array-of-structs D2Q9 reference. Shares no arithmetic with the
// library: own constant tables, Zou-He solved as a dense linear system.

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lbm2d/descriptors.hpp"
#include "lbm2d/geometry.hpp"

namespace oracle {

inline constexpr int cx[9] = {0, 1, 0, -1, 0, 1, -1, -1, 1};
inline constexpr int cy[9] = {0, 0, 1, 0, -1, 1, 1, -1, -1};
inline constexpr double w[9] = {4.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9,
                                1.0 / 36, 1.0 / 36, 1.0 / 36, 1.0 / 36};

inline int opp(int i) {
  for (int j = 0; j < 9; ++j) {
    if (cx[j] == -cx[i] && cy[j] == -cy[i]) return j;
  }
  throw std::logic_error("no opposite");
}

using F9 = std::array<double, 9>;

inline F9 feq(double rho, double ux, double uy) {
  F9 out{};
  for (int i = 0; i < 9; ++i) {
    const double cu = cx[i] * ux + cy[i] * uy;
    out[i] = w[i] * rho * (1 + 3 * cu + 4.5 * cu * cu - 1.5 * (ux * ux + uy * uy));
  }
  return out;
}

inline void moments(const F9& f, double& rho, double& ux, double& uy) {
  rho = 0;
  double jx = 0;
  double jy = 0;
  for (int i = 0; i < 9; ++i) {
    rho += f[i];
    jx += cx[i] * f[i];
    jy += cy[i] * f[i];
  }
  ux = rho != 0 ? jx / rho : 0;
  uy = rho != 0 ? jy / rho : 0;
}

// Gaussian elimination with partial pivoting, 4x4.
inline std::array<double, 4> solve4(std::array<std::array<double, 5>, 4> a) {
  for (int c = 0; c < 4; ++c) {
    int p = c;
    for (int r = c + 1; r < 4; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    if (a[c][c] == 0) throw std::runtime_error("singular");
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double k = a[r][c] / a[c][c];
      for (int j = c; j < 5; ++j) a[r][j] -= k * a[c][j];
    }
  }
  return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2], a[3][4] / a[3][3]};
}

// Inward unit normal of a wall.
inline std::pair<int, int> inward(lbm2d::WallOrientation wall) {
  switch (wall) {
    case lbm2d::WallOrientation::West: return {1, 0};
    case lbm2d::WallOrientation::East: return {-1, 0};
    case lbm2d::WallOrientation::North: return {0, -1};
    case lbm2d::WallOrientation::South: return {0, 1};
  }
  return {0, 0};
}

// Replaces the three inward-pointing populations so that the moments match the
// prescribed state and the normal non-equilibrium part bounces back.
inline void zou_he(F9& f, const lbm2d::BoundaryValue& bv) {
  const auto [nx, ny] = inward(bv.wall);
  int unk[3];
  int k = 0;
  int normal = -1;
  for (int i = 1; i < 9; ++i) {
    if (cx[i] * nx + cy[i] * ny > 0) unk[k++] = i;
    if (cx[i] == nx && cy[i] == ny) normal = i;
  }
  double s = 0, jx = 0, jy = 0;
  for (int i = 0; i < 9; ++i) {
    if (i == unk[0] || i == unk[1] || i == unk[2]) continue;
    s += f[i];
    jx += cx[i] * f[i];
    jy += cy[i] * f[i];
  }
  std::array<std::array<double, 5>, 4> a{};
  for (int j = 0; j < 3; ++j) {
    a[0][j] = 1;
    a[1][j] = cx[unk[j]];
    a[2][j] = cy[unk[j]];
    a[3][j] = unk[j] == normal ? 1 : 0;
  }
  const int axis_x = nx != 0 ? 1 : 0;
  const int axis_y = ny != 0 ? 1 : 0;
  if (bv.kind == lbm2d::BoundaryKind::Velocity) {
    const double ux = bv.velocity.x, uy = bv.velocity.y;
    a[0][3] = -1;
    a[0][4] = -s;
    a[1][3] = -ux;
    a[1][4] = -jx;
    a[2][3] = -uy;
    a[2][4] = -jy;
    a[3][3] = -2.0 / 3 * (cx[normal] * ux + cy[normal] * uy);
    a[3][4] = f[opp(normal)];
  } else {
    // unknown: velocity component along the wall normal axis
    const double rho = bv.density;
    a[0][3] = 0;
    a[0][4] = rho - s;
    a[1][3] = -rho * axis_x;
    a[1][4] = -jx;
    a[2][3] = -rho * axis_y;
    a[2][4] = -jy;
    a[3][3] = -2.0 / 3 * rho * (cx[normal] * axis_x + cy[normal] * axis_y);
    a[3][4] = f[opp(normal)];
  }
  const auto x = solve4(a);
  for (int j = 0; j < 3; ++j) f[unk[j]] = x[j];
}

struct Reference {
  const lbm2d::Geometry* g = nullptr;
  double omega = 1.0;
  std::vector<F9> cur;
  std::vector<F9> nxt;

  Reference(const lbm2d::Geometry& geo, double om) : g(&geo), omega(om) {
    cur.assign(static_cast<std::size_t>(geo.nx()) * geo.ny(), F9{});
    nxt = cur;
  }
  std::size_t at(int x, int y) const { return static_cast<std::size_t>(y) * g->nx() + x; }
  bool open(int x, int y) const {
    return x >= 0 && y >= 0 && x < g->nx() && y < g->ny() &&
           g->descriptors.type(x, y) != lbm2d::NodeType::Solid;
  }

  void step() {
    const auto& d = g->descriptors;
    for (int y = 0; y < g->ny(); ++y) {
      for (int x = 0; x < g->nx(); ++x) {
        if (!open(x, y)) continue;
        const F9& own = cur[at(x, y)];
        F9 f{};
        for (int i = 0; i < 9; ++i) {
          const int xs = x - cx[i], ys = y - cy[i];
          f[i] = open(xs, ys) ? cur[at(xs, ys)][i] : own[opp(i)];
        }
        const auto t = d.type(x, y);
        if (t == lbm2d::NodeType::VelocityBC || t == lbm2d::NodeType::PressureBC) {
          zou_he(f, g->boundary_values[static_cast<std::size_t>(d.bc_index(x, y))]);
        }
        double rho, ux, uy;
        moments(f, rho, ux, uy);
        const F9 eq = feq(rho, ux, uy);
        for (int i = 0; i < 9; ++i) f[i] = f[i] - omega * (f[i] - eq[i]);
        nxt[at(x, y)] = f;
      }
    }
    std::swap(cur, nxt);
  }
};

}  // namespace oracle
