#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "lbm2d/lattice.hpp"

namespace lbm2d {

enum class NodeType : std::uint8_t {
  Solid = 0,
  Fluid = 1,
  BounceBackWall = 2,
  VelocityBC = 3,
  PressureBC = 4,
};

std::string_view to_string(NodeType t);

constexpr bool is_boundary_value_node(NodeType t) {
  return t == NodeType::VelocityBC || t == NodeType::PressureBC;
}

/// Side of the domain a Zou-He closure faces; N is +y.
enum class WallOrientation : std::uint8_t { West = 0, East = 1, North = 2, South = 3 };

std::string_view to_string(WallOrientation o);

enum class BoundaryKind : std::uint8_t { Velocity = 0, Pressure = 1 };

struct BoundaryValue {
  BoundaryKind kind = BoundaryKind::Velocity;
  WallOrientation wall = WallOrientation::West;
  Vec2<double> velocity{};  // Velocity entries
  double density = 1.0;     // Pressure entries

  static BoundaryValue imposed_velocity(WallOrientation wall, Vec2<double> v) {
    return {BoundaryKind::Velocity, wall, v, 1.0};
  }
  static BoundaryValue imposed_density(WallOrientation wall, double rho) {
    return {BoundaryKind::Pressure, wall, {}, rho};
  }

  friend bool operator==(const BoundaryValue&, const BoundaryValue&) = default;
};

using BoundaryValueTable = std::vector<BoundaryValue>;

inline constexpr std::int32_t kNoBoundaryIndex = -1;

/// Per-node type tag, neighbour-presence mask and boundary-value index, row-major.
///
/// Bit (i - 1) of a node's mask is set iff the neighbour at x + v_i is inside the
/// domain and not Solid.
class NodeDescriptorField {
public:
  NodeDescriptorField() = default;
  NodeDescriptorField(int nx, int ny);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return types_.size(); }

  bool in_domain(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < nx_ && y < ny_; }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(x);
  }

  NodeType type(int x, int y) const noexcept { return types_[index(x, y)]; }
  std::uint8_t mask(int x, int y) const noexcept { return masks_[index(x, y)]; }
  std::int32_t bc_index(int x, int y) const noexcept { return bc_indices_[index(x, y)]; }

  void set(int x, int y, NodeType t, std::int32_t bc = kNoBoundaryIndex) {
    types_[index(x, y)] = t;
    bc_indices_[index(x, y)] = bc;
  }

  /// Recompute every neighbour mask from the type tags.
  void recompute_masks();

  std::size_t count(NodeType t) const;
  std::size_t non_solid_count() const;

  const std::vector<NodeType>& types() const noexcept { return types_; }
  const std::vector<std::uint8_t>& masks() const noexcept { return masks_; }
  const std::vector<std::int32_t>& bc_indices() const noexcept { return bc_indices_; }

  friend bool operator==(const NodeDescriptorField&, const NodeDescriptorField&) = default;

private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<NodeType> types_;
  std::vector<std::uint8_t> masks_;
  std::vector<std::int32_t> bc_indices_;
};

constexpr bool neighbor_present(std::uint8_t mask, int direction) {
  return (mask >> (direction - 1)) & 1u;
}

inline constexpr std::uint8_t kAllNeighbors = 0xFF;

}  // namespace lbm2d
