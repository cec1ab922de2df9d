#include "doctest.h"

#include "closure_check.hpp"
#include "lbm2d/boundary.hpp"
#include "lbm2d/error.hpp"

using namespace lbm2d;

TEST_CASE("Zou-He closures impose their moments") {
  const auto r = closure_check::run(10000, 2024);
  CHECK(r.cases == 10000);
  CHECK(r.moment_err <= 1e-12);
  CHECK(r.oracle_err <= 1e-12);
  CHECK(r.known_err == 0.0);
}

TEST_CASE("Zou-He at rest returns the rest equilibrium") {
  const auto eq = equilibrium<double>(1.0, {0.0, 0.0});
  for (auto wall : closure_check::kWalls) {
    const auto v = zou_he_velocity(eq, wall, Vec2<double>{0.0, 0.0});
    CHECK(v.rho == 1.0);
    CHECK(v.f == eq);
    const auto p = zou_he_pressure(eq, wall, 1.0);
    CHECK(p.v.x == 0.0);
    CHECK(p.v.y == 0.0);
    CHECK(p.f == eq);
  }
}

TEST_CASE("Zou-He rejects unusable imposed values") {
  const auto eq = equilibrium<double>(1.0, {0.0, 0.0});
  CHECK_THROWS_AS(zou_he_velocity(eq, WallOrientation::West, Vec2<double>{1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(zou_he_velocity(eq, WallOrientation::West, Vec2<double>{std::nan(""), 0.0}), InvalidArgument);
  CHECK_THROWS_AS(zou_he_pressure(eq, WallOrientation::East, 0.0), InvalidArgument);
  CHECK_THROWS_AS(zou_he_pressure(eq, WallOrientation::East, -1.0), InvalidArgument);
}

TEST_CASE("bounce-back substitutes the node's own opposite population") {
  Pdf9<double> own{};
  for (std::size_t i = 0; i < 9; ++i) own[i] = 0.1 * static_cast<double>(i + 1);
  for (int i = 1; i < 9; ++i) CHECK(bounce_back_gather(own, i) == own[static_cast<std::size_t>(opposite_direction(i))]);
  CHECK_THROWS_AS(bounce_back_gather(own, 0), InvalidArgument);

  // south wall node: neighbours in directions 4, 7, 8 are missing
  std::uint8_t mask = kAllNeighbors;
  for (int d : {4, 7, 8}) mask = static_cast<std::uint8_t>(mask & ~(1u << (d - 1)));
  Pdf9<double> gathered{};
  gathered.fill(-1.0);
  const auto f = resolve_boundary(NodeType::BounceBackWall, mask, kNoBoundaryIndex, own, gathered, {});
  CHECK(f[2] == own[4]);
  CHECK(f[5] == own[7]);
  CHECK(f[6] == own[8]);
  CHECK(f[1] == -1.0);
  CHECK(f[4] == -1.0);
  CHECK_THROWS_AS(resolve_boundary(NodeType::Solid, mask, kNoBoundaryIndex, own, gathered, {}), InvalidArgument);
  CHECK_THROWS_AS(resolve_boundary(NodeType::VelocityBC, mask, 3, own, gathered, {}), InvalidArgument);
}
