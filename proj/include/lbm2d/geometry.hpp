#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "lbm2d/descriptors.hpp"

namespace lbm2d {

enum class ObstacleShape : std::uint8_t { Circle, Square };

/// Size is the diameter for circles and the edge length for squares, in nodes.
struct Obstacle {
  ObstacleShape shape = ObstacleShape::Circle;
  double size = 0.0;
  Vec2<double> center{};
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

/// Node descriptors plus everything a run needs to reproduce the domain.
struct Geometry {
  NodeDescriptorField descriptors;
  BoundaryValueTable boundary_values;
  double porosity = 1.0;

  std::string case_name;
  std::string parameters;  // free-form "key=value" list, provenance only
  std::uint64_t seed = 0;
  double characteristic_length = 1.0;
  double initial_density = 1.0;  // default rho0 for interior nodes
  std::vector<Obstacle> obstacles;

  int nx() const noexcept { return descriptors.nx(); }
  int ny() const noexcept { return descriptors.ny(); }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Non-solid share of all nodes.
double porosity(const Geometry& g);
double porosity(const NodeDescriptorField& d);

/// Brings a hand-assembled descriptor grid into builder-output form: removes
/// isolated non-solid nodes, turns Fluid nodes next to Solid/out-of-domain into
/// BounceBackWall, recomputes masks and porosity and validates boundary indices.
void finalize_geometry(Geometry& g);

/// Lid-driven cavity. Top row (lid, corners included) is a VelocityBC with
/// v = (U_lid, 0); other borders are BounceBackWall. L = n_y - 1.
Geometry build_cavity(int nx, int ny, double u_lid);

struct VelocityInlet {
  Vec2<double> velocity{0.1, 0.0};
};
struct PressureInlet {
  double density = 1.016;
};
using Inlet = std::variant<VelocityInlet, PressureInlet>;

inline constexpr double kOutletDensity = 1.0;
inline constexpr double kChanPInitialDensity = 1.008;

/// Channel: inlet on the west column, constant-density outlet (rho = 1) on the
/// east column, bounce-back top and bottom rows.
Geometry build_channel(int nx, int ny, const Inlet& inlet);

/// Marks the shape Solid and rebuilds the bounce-back ring around it.
void add_cylinder(Geometry& g, ObstacleShape shape, double size, Vec2<double> center);

/// n x n domain, pressure inlet/outlet, 8x8 array of equal circles sized by
/// bisection so the porosity lands within 0.02 of the target.
Geometry build_porous_regular(int n, double phi_target);

/// n x n domain with randomly placed circles, r in [8, 256], until the porosity
/// is at most phi_target + 0.02. Deterministic for a given seed.
Geometry build_porous_random(int n, double phi_target, std::uint64_t seed);

/// Text header, run-length encoded node payload, boundary-value table.
void save_geometry(const Geometry& g, const std::filesystem::path& path);
Geometry load_geometry(const std::filesystem::path& path);

}  // namespace lbm2d
