#pragma once
// Random admissible inputs for the Zou-He closures, scored against the imposed
// moments and against the linear-system oracle.

#include <algorithm>
#include <cmath>
#include <random>

#include "lbm2d/boundary.hpp"
#include "reference_oracle.hpp"

namespace closure_check {

struct Result {
  double moment_err = 0.0;  // |computed moment - imposed|
  double oracle_err = 0.0;  // |f - oracle f|
  double known_err = 0.0;   // changes to the known populations
  int cases = 0;
};

inline const lbm2d::WallOrientation kWalls[4] = {lbm2d::WallOrientation::West, lbm2d::WallOrientation::East,
                                                 lbm2d::WallOrientation::North, lbm2d::WallOrientation::South};

inline Result run(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> vel(-0.1, 0.1);
  std::uniform_real_distribution<double> dens(0.9, 1.1);
  std::uniform_real_distribution<double> noise(-2e-3, 2e-3);
  Result r;
  for (int k = 0; k < n; ++k) {
    const auto wall = kWalls[k % 4];
    const bool velocity = (k / 4) % 2 == 0;
    const oracle::F9 base = oracle::feq(dens(rng), vel(rng), vel(rng));
    lbm2d::Pdf9<double> f{};
    for (std::size_t i = 0; i < 9; ++i) f[i] = base[i] + noise(rng) * base[i];

    lbm2d::BoundaryValue bv = velocity ? lbm2d::BoundaryValue::imposed_velocity(wall, {vel(rng), vel(rng)})
                                       : lbm2d::BoundaryValue::imposed_density(wall, dens(rng));
    oracle::F9 expect{};
    std::copy(f.begin(), f.end(), expect.begin());
    oracle::zou_he(expect, bv);

    lbm2d::BcOutcome<double> out = velocity ? lbm2d::zou_he_velocity(f, wall, bv.velocity)
                                            : lbm2d::zou_he_pressure(f, wall, bv.density);
    double rho, ux, uy;
    oracle::F9 got{};
    std::copy(out.f.begin(), out.f.end(), got.begin());
    oracle::moments(got, rho, ux, uy);
    if (velocity) {
      r.moment_err = std::max({r.moment_err, std::abs(ux - bv.velocity.x), std::abs(uy - bv.velocity.y),
                               std::abs(rho - out.rho)});
    } else {
      const bool ns = wall == lbm2d::WallOrientation::North || wall == lbm2d::WallOrientation::South;
      const double tangential = ns ? ux : uy;
      r.moment_err = std::max({r.moment_err, std::abs(rho - bv.density), std::abs(tangential),
                               std::abs((ns ? uy : ux) - (ns ? out.v.y : out.v.x))});
    }
    const auto [nx, ny] = oracle::inward(wall);
    for (int i = 0; i < 9; ++i) {
      r.oracle_err = std::max(r.oracle_err, std::abs(got[i] - expect[i]));
      if (oracle::cx[i] * nx + oracle::cy[i] * ny <= 0) r.known_err = std::max(r.known_err, std::abs(got[i] - f[i]));
    }
    ++r.cases;
  }
  return r;
}

}  // namespace closure_check
