#include "lbm2d/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>
#include <utility>

#include "lbm2d/error.hpp"
#include "lbm2d/format.hpp"

namespace lbm2d {

namespace {

int priority(NodeType t) {
  switch (t) {
    case NodeType::VelocityBC: return 3;
    case NodeType::PressureBC: return 2;
    case NodeType::BounceBackWall: return 1;
    default: return 0;
  }
}

/// Border assignment honouring VelocityBC > PressureBC > BounceBackWall.
void assign_border(NodeDescriptorField& d, int x, int y, NodeType t, std::int32_t bc) {
  if (priority(t) > priority(d.type(x, y))) {
    d.set(x, y, t, bc);
  }
}

bool on_border(const NodeDescriptorField& d, int x, int y) {
  return x == 0 || y == 0 || x == d.nx() - 1 || y == d.ny() - 1;
}

/// Channel-style walls: west/east columns get the given boundary entries,
/// south/north rows bounce back.
void set_channel_walls(NodeDescriptorField& d, NodeType west, NodeType east) {
  const int nx = d.nx();
  const int ny = d.ny();
  for (int x = 0; x < nx; ++x) {
    assign_border(d, x, 0, NodeType::BounceBackWall, kNoBoundaryIndex);
    assign_border(d, x, ny - 1, NodeType::BounceBackWall, kNoBoundaryIndex);
  }
  for (int y = 0; y < ny; ++y) {
    assign_border(d, 0, y, west, 0);
    assign_border(d, nx - 1, y, east, 1);
  }
}

bool inside(ObstacleShape shape, double size, Vec2<double> c, int x, int y) {
  const double dx = x - c.x;
  const double dy = y - c.y;
  if (shape == ObstacleShape::Circle) {
    const double r = 0.5 * size;
    return dx * dx + dy * dy <= r * r;
  }
  const double h = 0.5 * size;
  return dx >= -h && dx < h && dy >= -h && dy < h;
}

struct Box {
  int x0, x1, y0, y1;  // inclusive, clipped
};

Box bounding_box(double size, Vec2<double> c, int nx, int ny) {
  const double h = 0.5 * size + 1.0;
  return {std::max(0, static_cast<int>(std::floor(c.x - h))),
          std::min(nx - 1, static_cast<int>(std::ceil(c.x + h))),
          std::max(0, static_cast<int>(std::floor(c.y - h))),
          std::min(ny - 1, static_cast<int>(std::ceil(c.y + h)))};
}

Geometry porous_base(int n, const char* case_name) {
  if (n < 16) {
    throw InvalidArgument("porous domain must be at least 16 nodes wide");
  }
  Geometry g;
  g.descriptors = NodeDescriptorField(n, n);
  g.boundary_values = {BoundaryValue::imposed_density(WallOrientation::West, 1.016),
                       BoundaryValue::imposed_density(WallOrientation::East, kOutletDensity)};
  set_channel_walls(g.descriptors, NodeType::PressureBC, NodeType::PressureBC);
  g.case_name = case_name;
  g.characteristic_length = n;
  return g;
}

/// Solid-node coverage of 8x8 equal circles of radius r on an n x n grid.
std::size_t regular_array_solid_count(int n, double r, std::vector<std::uint8_t>& scratch) {
  if (r <= 0.0) return 0;
  scratch.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  std::size_t solid = 0;
  const double spacing = n / 8.0;
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) {
      const Vec2<double> c{spacing / 2 + i * spacing, spacing / 2 + j * spacing};
      const Box b = bounding_box(2 * r, c, n, n);
      for (int y = b.y0; y <= b.y1; ++y) {
        for (int x = b.x0; x <= b.x1; ++x) {
          if (inside(ObstacleShape::Circle, 2 * r, c, x, y)) {
            auto& cell = scratch[static_cast<std::size_t>(y) * static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(x)];
            solid += cell == 0;
            cell = 1;
          }
        }
      }
    }
  }
  return solid;
}

void mark_circle(NodeDescriptorField& d, Vec2<double> c, double r) {
  const Box b = bounding_box(2 * r, c, d.nx(), d.ny());
  for (int y = b.y0; y <= b.y1; ++y) {
    for (int x = b.x0; x <= b.x1; ++x) {
      if (inside(ObstacleShape::Circle, 2 * r, c, x, y)) d.set(x, y, NodeType::Solid);
    }
  }
}

}  // namespace

double porosity(const NodeDescriptorField& d) {
  if (d.size() == 0) return 0.0;
  return static_cast<double>(d.non_solid_count()) / static_cast<double>(d.size());
}

double porosity(const Geometry& g) { return porosity(g.descriptors); }

void finalize_geometry(Geometry& g) {
  auto& d = g.descriptors;
  d.recompute_masks();
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < d.ny(); ++y) {
      for (int x = 0; x < d.nx(); ++x) {
        if (d.type(x, y) != NodeType::Solid && d.mask(x, y) == 0) {
          d.set(x, y, NodeType::Solid);
          changed = true;
        }
      }
    }
    if (changed) d.recompute_masks();
  }
  for (int y = 0; y < d.ny(); ++y) {
    for (int x = 0; x < d.nx(); ++x) {
      const NodeType t = d.type(x, y);
      if (t == NodeType::Solid) {
        d.set(x, y, NodeType::Solid);
      } else if (t == NodeType::Fluid && d.mask(x, y) != kAllNeighbors) {
        d.set(x, y, NodeType::BounceBackWall);
      } else if (is_boundary_value_node(t)) {
        const std::int32_t bc = d.bc_index(x, y);
        if (bc < 0 || static_cast<std::size_t>(bc) >= g.boundary_values.size()) {
          throw InvalidArgument("boundary node without a boundary value entry");
        }
        const BoundaryKind kind = g.boundary_values[static_cast<std::size_t>(bc)].kind;
        if ((t == NodeType::VelocityBC) != (kind == BoundaryKind::Velocity)) {
          throw InvalidArgument("boundary node type does not match its boundary value kind");
        }
        if (!on_border(d, x, y) && d.mask(x, y) == kAllNeighbors) {
          throw InvalidArgument("boundary node is neither on the domain border nor on an obstacle");
        }
      } else if (t != NodeType::BounceBackWall) {
        d.set(x, y, t);
      }
    }
  }
  g.porosity = porosity(d);
}

Geometry build_cavity(int nx, int ny, double u_lid) {
  if (nx < 8 || ny < 8) {
    throw InvalidArgument("cavity needs at least 8 x 8 nodes");
  }
  if (!std::isfinite(u_lid) || std::abs(u_lid) >= 1.0) {
    throw InvalidArgument("lid velocity must be finite with |U| < 1");
  }
  Geometry g;
  g.descriptors = NodeDescriptorField(nx, ny);
  g.boundary_values = {BoundaryValue::imposed_velocity(WallOrientation::North, {u_lid, 0.0})};
  auto& d = g.descriptors;
  for (int x = 0; x < nx; ++x) {
    assign_border(d, x, ny - 1, NodeType::VelocityBC, 0);
    assign_border(d, x, 0, NodeType::BounceBackWall, kNoBoundaryIndex);
  }
  for (int y = 0; y < ny; ++y) {
    assign_border(d, 0, y, NodeType::BounceBackWall, kNoBoundaryIndex);
    assign_border(d, nx - 1, y, NodeType::BounceBackWall, kNoBoundaryIndex);
  }
  g.case_name = "cavity";
  g.parameters = "U_lid=" + format_double(u_lid);
  g.characteristic_length = ny - 1;
  finalize_geometry(g);
  return g;
}

Geometry build_channel(int nx, int ny, const Inlet& inlet) {
  if (ny < 8 || nx <= ny) {
    throw InvalidArgument("channel needs n_x > n_y >= 8");
  }
  Geometry g;
  g.descriptors = NodeDescriptorField(nx, ny);
  g.characteristic_length = ny;
  NodeType west = NodeType::VelocityBC;
  if (const auto* v = std::get_if<VelocityInlet>(&inlet)) {
    if (std::hypot(v->velocity.x, v->velocity.y) >= 1.0 || v->velocity.x >= 1.0) {
      throw InvalidArgument("inlet velocity must satisfy |v| < 1");
    }
    g.boundary_values.push_back(BoundaryValue::imposed_velocity(WallOrientation::West, v->velocity));
    g.case_name = "chan_v";
    g.parameters = "v_x=" + format_double(v->velocity.x) + " v_y=" + format_double(v->velocity.y);
  } else {
    const double rho = std::get<PressureInlet>(inlet).density;
    if (!(rho > 0.0)) {
      throw InvalidArgument("inlet density must be positive");
    }
    west = NodeType::PressureBC;
    g.boundary_values.push_back(BoundaryValue::imposed_density(WallOrientation::West, rho));
    g.case_name = "chan_p";
    g.parameters = "rho_in=" + format_double(rho);
    g.initial_density = kChanPInitialDensity;
  }
  g.boundary_values.push_back(BoundaryValue::imposed_density(WallOrientation::East, kOutletDensity));
  set_channel_walls(g.descriptors, west, NodeType::PressureBC);
  finalize_geometry(g);
  return g;
}

void add_cylinder(Geometry& g, ObstacleShape shape, double size, Vec2<double> center) {
  auto& d = g.descriptors;
  if (!(size > 0.0) || !std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw InvalidArgument("cylinder size must be positive and its center finite");
  }
  const Box b = bounding_box(size, center, d.nx(), d.ny());
  std::vector<std::pair<int, int>> cells;
  for (int y = b.y0; y <= b.y1; ++y) {
    for (int x = b.x0; x <= b.x1; ++x) {
      if (inside(shape, size, center, x, y)) cells.push_back({x, y});
    }
  }
  // the whole shape and its bounce-back ring must stay off the border rows
  const double h = 0.5 * size;
  const bool fits = center.x - h >= 2.0 && center.x + h <= d.nx() - 3.0 &&
                    center.y - h >= 2.0 && center.y + h <= d.ny() - 3.0;
  if (cells.empty() || !fits) {
    throw InvalidArgument("cylinder does not fit strictly inside the fluid region");
  }
  for (const auto& [x, y] : cells) {
    if (d.type(x, y) != NodeType::Fluid && d.type(x, y) != NodeType::BounceBackWall &&
        d.type(x, y) != NodeType::Solid) {
      throw InvalidArgument("cylinder overlaps a boundary-value node");
    }
    d.set(x, y, NodeType::Solid);
  }
  g.obstacles.push_back({shape, size, center});
  finalize_geometry(g);
}

Geometry build_porous_regular(int n, double phi_target) {
  if (!(phi_target >= 0.3 && phi_target <= 1.0)) {
    throw InvalidArgument("regular circle arrays need 0.3 <= phi <= 1");
  }
  Geometry g = porous_base(n, "porous_regular");
  g.parameters = "phi_target=" + format_double(phi_target);
  const double total = static_cast<double>(n) * n;
  double radius = 0.0;
  if (phi_target < 1.0) {
    std::vector<std::uint8_t> scratch;
    double lo = 0.0;
    double hi = n / 8.0;
    double best = 0.0;
    double best_err = 1.0;
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double phi = 1.0 - static_cast<double>(regular_array_solid_count(n, mid, scratch)) / total;
      const double err = std::abs(phi - phi_target);
      if (err < best_err) {
        best_err = err;
        best = mid;
      }
      if (err <= 0.002) break;
      if (phi > phi_target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    radius = best;
  }
  if (radius > 0.0) {
    const double spacing = n / 8.0;
    for (int j = 0; j < 8; ++j) {
      for (int i = 0; i < 8; ++i) {
        const Vec2<double> c{spacing / 2 + i * spacing, spacing / 2 + j * spacing};
        mark_circle(g.descriptors, c, radius);
        g.obstacles.push_back({ObstacleShape::Circle, 2 * radius, c});
      }
    }
  }
  finalize_geometry(g);
  if (std::abs(g.porosity - phi_target) > 0.02) {
    throw InvalidArgument("porosity " + format_double(phi_target) +
                          " is unreachable with an 8x8 circle array on this grid");
  }
  return g;
}

Geometry build_porous_random(int n, double phi_target, std::uint64_t seed) {
  if (!(phi_target >= 0.1 && phi_target <= 1.0)) {
    throw InvalidArgument("random circle packings need 0.1 <= phi <= 1");
  }
  Geometry g = porous_base(n, "porous_random");
  g.parameters = "phi_target=" + format_double(phi_target);
  g.seed = seed;
  auto& d = g.descriptors;

  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const double total = static_cast<double>(n) * n;
  const double upper = phi_target + 0.02;
  const double lower = phi_target - 0.02;
  std::size_t solid = 0;
  constexpr int kMaxConsecutiveRejects = 10000;
  int rejects = 0;
  while (1.0 - static_cast<double>(solid) / total > upper) {
    const Vec2<double> c{uniform() * n, uniform() * n};
    const double r = 8.0 + uniform() * (256.0 - 8.0);
    const Box b = bounding_box(2 * r, c, n, n);
    std::size_t fresh = 0;
    for (int y = b.y0; y <= b.y1; ++y) {
      for (int x = b.x0; x <= b.x1; ++x) {
        fresh += d.type(x, y) != NodeType::Solid && inside(ObstacleShape::Circle, 2 * r, c, x, y);
      }
    }
    if (1.0 - static_cast<double>(solid + fresh) / total < lower) {
      if (++rejects > kMaxConsecutiveRejects) break;
      continue;
    }
    rejects = 0;
    mark_circle(d, c, r);
    solid += fresh;
    g.obstacles.push_back({ObstacleShape::Circle, 2 * r, c});
  }
  finalize_geometry(g);
  return g;
}

// ---------------------------------------------------------------------------
// File format
//
//   LBM2D-GEOMETRY 1
//   nx <int>
//   ny <int>
//   case <name>
//   seed <uint64>
//   porosity <double>
//   params <rest of line>
//   length <double>
//   density <double>
//   obstacles <count>
//   obstacle circle|square <size> <cx> <cy>        (count lines)
//   boundary_values <count>
//   bv velocity <W|E|N|S> <vx> <vy>                 (count lines, mixed with)
//   bv pressure <W|E|N|S> <rho>
//   runs <count>
//   <type tag 0..4> <bc index> <length>             (count lines, row-major)
//   end
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "LBM2D-GEOMETRY";
constexpr int kVersion = 1;

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string> tokens() {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ParseError("unexpected end of file", line_ + 1);
    }
    ++line_;
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(std::move(t));
    if (out.empty()) throw ParseError("empty line", line_);
    return out;
  }

  std::vector<std::string> expect(std::string_view key, std::size_t n_values) {
    auto t = tokens();
    if (t[0] != key || t.size() != n_values + 1) {
      throw ParseError("expected '" + std::string(key) + "' with " + std::to_string(n_values) +
                           " value(s)",
                       line_);
    }
    return t;
  }

  std::string rest_of(std::string_view key) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("unexpected end of file", line_ + 1);
    ++line_;
    if (line.compare(0, key.size(), key) != 0) {
      throw ParseError("expected '" + std::string(key) + "'", line_);
    }
    std::string rest = line.substr(key.size());
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return rest;
  }

  template <typename N>
  N number(const std::string& s) const {
    N v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw ParseError("malformed number '" + s + "'", line_);
    }
    return v;
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::istream& in_;
  std::size_t line_ = 0;
};

WallOrientation parse_wall(const std::string& s, std::size_t line) {
  if (s == "W") return WallOrientation::West;
  if (s == "E") return WallOrientation::East;
  if (s == "N") return WallOrientation::North;
  if (s == "S") return WallOrientation::South;
  throw ParseError("unknown wall orientation '" + s + "'", line);
}

}  // namespace

void save_geometry(const Geometry& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  const auto& d = g.descriptors;
  out << kMagic << ' ' << kVersion << '\n';
  out << "nx " << d.nx() << '\n' << "ny " << d.ny() << '\n';
  out << "case " << (g.case_name.empty() ? "custom" : g.case_name) << '\n';
  out << "seed " << g.seed << '\n';
  out << "porosity " << format_double(g.porosity) << '\n';
  out << "params " << g.parameters << '\n';
  out << "length " << format_double(g.characteristic_length) << '\n';
  out << "density " << format_double(g.initial_density) << '\n';
  out << "obstacles " << g.obstacles.size() << '\n';
  for (const Obstacle& o : g.obstacles) {
    out << "obstacle " << (o.shape == ObstacleShape::Circle ? "circle" : "square") << ' '
        << format_double(o.size) << ' ' << format_double(o.center.x) << ' '
        << format_double(o.center.y) << '\n';
  }
  out << "boundary_values " << g.boundary_values.size() << '\n';
  for (const BoundaryValue& bv : g.boundary_values) {
    if (bv.kind == BoundaryKind::Velocity) {
      out << "bv velocity " << to_string(bv.wall) << ' ' << format_double(bv.velocity.x) << ' '
          << format_double(bv.velocity.y) << '\n';
    } else {
      out << "bv pressure " << to_string(bv.wall) << ' ' << format_double(bv.density) << '\n';
    }
  }

  struct Run {
    NodeType type;
    std::int32_t bc;
    std::size_t length;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const NodeType t = d.types()[k];
    const std::int32_t bc = d.bc_indices()[k];
    if (!runs.empty() && runs.back().type == t && runs.back().bc == bc) {
      ++runs.back().length;
    } else {
      runs.push_back({t, bc, 1});
    }
  }
  out << "runs " << runs.size() << '\n';
  for (const Run& r : runs) {
    out << static_cast<int>(r.type) << ' ' << r.bc << ' ' << r.length << '\n';
  }
  out << "end\n";
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

Geometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  LineReader r(in);
  Geometry g;

  auto head = r.expect(kMagic, 1);
  if (r.number<int>(head[1]) != kVersion) {
    throw ParseError("unsupported geometry version " + head[1], r.line());
  }
  const int nx = r.number<int>(r.expect("nx", 1)[1]);
  const int ny = r.number<int>(r.expect("ny", 1)[1]);
  if (nx <= 0 || ny <= 0) throw ParseError("dimensions must be positive", r.line());
  g.case_name = r.expect("case", 1)[1];
  g.seed = r.number<std::uint64_t>(r.expect("seed", 1)[1]);
  const double stored_porosity = r.number<double>(r.expect("porosity", 1)[1]);
  g.parameters = r.rest_of("params");
  g.characteristic_length = r.number<double>(r.expect("length", 1)[1]);
  g.initial_density = r.number<double>(r.expect("density", 1)[1]);

  const auto n_obstacles = r.number<std::size_t>(r.expect("obstacles", 1)[1]);
  for (std::size_t k = 0; k < n_obstacles; ++k) {
    auto t = r.expect("obstacle", 4);
    Obstacle o;
    if (t[1] == "circle") {
      o.shape = ObstacleShape::Circle;
    } else if (t[1] == "square") {
      o.shape = ObstacleShape::Square;
    } else {
      throw ParseError("unknown obstacle shape '" + t[1] + "'", r.line());
    }
    o.size = r.number<double>(t[2]);
    o.center = {r.number<double>(t[3]), r.number<double>(t[4])};
    g.obstacles.push_back(o);
  }

  const auto n_bv = r.number<std::size_t>(r.expect("boundary_values", 1)[1]);
  for (std::size_t k = 0; k < n_bv; ++k) {
    auto t = r.tokens();
    if (t[0] != "bv" || t.size() < 4) throw ParseError("expected boundary value entry", r.line());
    const WallOrientation wall = parse_wall(t[2], r.line());
    if (t[1] == "velocity" && t.size() == 5) {
      g.boundary_values.push_back(BoundaryValue::imposed_velocity(
          wall, {r.number<double>(t[3]), r.number<double>(t[4])}));
    } else if (t[1] == "pressure" && t.size() == 4) {
      g.boundary_values.push_back(BoundaryValue::imposed_density(wall, r.number<double>(t[3])));
    } else {
      throw ParseError("malformed boundary value entry", r.line());
    }
  }

  g.descriptors = NodeDescriptorField(nx, ny);
  auto& d = g.descriptors;
  const auto n_runs = r.number<std::size_t>(r.expect("runs", 1)[1]);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < n_runs; ++k) {
    auto t = r.tokens();
    if (t.size() != 3) throw ParseError("run needs type, bc index and length", r.line());
    const int tag = r.number<int>(t[0]);
    const auto bc = r.number<std::int32_t>(t[1]);
    const auto len = r.number<std::size_t>(t[2]);
    if (tag < 0 || tag > static_cast<int>(NodeType::PressureBC)) {
      throw ParseError("unknown node type tag " + t[0], r.line());
    }
    if (bc < kNoBoundaryIndex || (bc >= 0 && static_cast<std::size_t>(bc) >= n_bv)) {
      throw ParseError("boundary index out of range", r.line());
    }
    if (len == 0 || pos + len > d.size()) throw ParseError("run overflows the grid", r.line());
    for (std::size_t e = pos + len; pos < e; ++pos) {
      d.set(static_cast<int>(pos % static_cast<std::size_t>(nx)),
            static_cast<int>(pos / static_cast<std::size_t>(nx)), static_cast<NodeType>(tag), bc);
    }
  }
  if (pos != d.size()) throw ParseError("runs cover fewer nodes than the grid", r.line());
  r.expect("end", 0);

  d.recompute_masks();
  g.porosity = porosity(d);
  if (g.porosity != stored_porosity) {
    throw ParseError("stored porosity does not match node payload", 6);
  }
  return g;
}

}  // namespace lbm2d
