#include "lbm2d/descriptors.hpp"

#include <algorithm>

#include "lbm2d/error.hpp"

namespace lbm2d {

std::string_view to_string(NodeType t) {
  switch (t) {
    case NodeType::Solid: return "solid";
    case NodeType::Fluid: return "fluid";
    case NodeType::BounceBackWall: return "bounce_back";
    case NodeType::VelocityBC: return "velocity_bc";
    case NodeType::PressureBC: return "pressure_bc";
  }
  return "unknown";
}

std::string_view to_string(WallOrientation o) {
  switch (o) {
    case WallOrientation::West: return "W";
    case WallOrientation::East: return "E";
    case WallOrientation::North: return "N";
    case WallOrientation::South: return "S";
  }
  return "?";
}

NodeDescriptorField::NodeDescriptorField(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx <= 0 || ny <= 0) {
    throw InvalidArgument("descriptor field dimensions must be positive");
  }
  const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  types_.assign(n, NodeType::Fluid);
  masks_.assign(n, 0);
  bc_indices_.assign(n, kNoBoundaryIndex);
}

void NodeDescriptorField::recompute_masks() {
  for (int y = 0; y < ny_; ++y) {
    for (int x = 0; x < nx_; ++x) {
      std::uint8_t m = 0;
      if (type(x, y) != NodeType::Solid) {
        for (int i = 1; i < 9; ++i) {
          const int xn = x + d2q9::kVx[static_cast<std::size_t>(i)];
          const int yn = y + d2q9::kVy[static_cast<std::size_t>(i)];
          if (in_domain(xn, yn) && type(xn, yn) != NodeType::Solid) {
            m |= static_cast<std::uint8_t>(1u << (i - 1));
          }
        }
      }
      masks_[index(x, y)] = m;
    }
  }
}

std::size_t NodeDescriptorField::count(NodeType t) const {
  return static_cast<std::size_t>(std::count(types_.begin(), types_.end(), t));
}

std::size_t NodeDescriptorField::non_solid_count() const { return size() - count(NodeType::Solid); }

}  // namespace lbm2d
