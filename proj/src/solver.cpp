#include "lbm2d/solver.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

#include "lbm2d/kernels/collide.hpp"

namespace lbm2d {

namespace {

constexpr auto& kVx = d2q9::kVx;
constexpr auto& kVy = d2q9::kVy;

}  // namespace

template <typename T>
Simulation<T>::Simulation(Geometry geometry, LayoutKind layout, FlowParams params,
                          SolverOptions options)
    : geometry_(std::move(geometry)),
      field_(geometry_.descriptors, layout),
      params_(params),
      omega_(static_cast<T>(params.omega)),
      isa_(kernels::isa_available(options.isa) ? options.isa : kernels::Isa::Scalar),
      run_(kernels::run_kernel<T>(isa_)),
      workers_(options.workers > 0 ? options.workers : omp_get_max_threads()),
      divergence_every_(options.divergence_check_every) {
  if (!(params.omega > 0.0 && params.omega < 2.0)) {
    throw InvalidArgument("collision frequency must lie in (0, 2)");
  }
  bc_.reserve(geometry_.boundary_values.size());
  for (const BoundaryValue& b : geometry_.boundary_values) {
    bc_.push_back(BoundaryValueT<T>::from(b));
  }
  active_nodes_ = geometry_.descriptors.non_solid_count();
}

template <typename T>
void Simulation<T>::initialize(const std::function<Moments<double>(int x, int y)>& state) {
  field_ = PdfField<T>(geometry_.descriptors, field_.layout());
  const auto& d = geometry_.descriptors;
  for (int y = 0; y < d.ny(); ++y) {
    for (int x = 0; x < d.nx(); ++x) {
      if (d.type(x, y) == NodeType::Solid) continue;
      const Moments<double> m = state(x, y);
      const Pdf9<T> feq = equilibrium<T>(T(m.rho), {T(m.v.x), T(m.v.y)});
      for (int i = 0; i < 9; ++i) {
        field_.write(x, y, i, BufferRole::Pre, feq[static_cast<std::size_t>(i)]);
      }
    }
  }
  step_count_ = 0;
  visited_last_ = 0;
  visited_total_ = 0;
}

template <typename T>
void Simulation<T>::initialize(double rho0, Vec2<double> v0) {
  initialize([&](int, int) { return Moments<double>{rho0, v0}; });
}

template <typename T>
void Simulation<T>::initialize() {
  const auto& d = geometry_.descriptors;
  const double rho0 = geometry_.initial_density;
  initialize([&](int x, int y) {
    const std::int32_t bc = d.bc_index(x, y);
    if (bc >= 0) {
      const BoundaryValue& b = geometry_.boundary_values[static_cast<std::size_t>(bc)];
      if (b.kind == BoundaryKind::Velocity) return Moments<double>{rho0, b.velocity};
      return Moments<double>{b.density, {0.0, 0.0}};
    }
    return Moments<double>{rho0, {0.0, 0.0}};
  });
}

template <typename T>
void Simulation<T>::node_dense(int x, int y, const T* const* pre, T* const* post) {
  const auto& d = geometry_.descriptors;
  const std::size_t idx = d.index(x, y);
  const std::ptrdiff_t nx = d.nx();
  const std::uint8_t mask = d.masks()[idx];
  T own[9];
  T f[9];
  for (int i = 0; i < 9; ++i) own[i] = pre[i][idx];
  f[0] = own[0];
  for (int i = 1; i < 9; ++i) {
    if (neighbor_present(mask, d2q9::kOpposite[static_cast<std::size_t>(i)])) {
      f[i] = pre[i][static_cast<std::ptrdiff_t>(idx) - kVy[static_cast<std::size_t>(i)] * nx -
                    kVx[static_cast<std::size_t>(i)]];
    }
  }
  const std::int32_t bc = d.bc_indices()[idx];
  resolve_node(f, own, d.types()[idx], mask, bc >= 0 ? &bc_[static_cast<std::size_t>(bc)] : nullptr);
  kernels::collide_node(f, omega_);
  for (int i = 0; i < 9; ++i) post[i][idx] = f[i];
}

template <typename T>
void Simulation<T>::process_row_range(int y, int x_begin, int x_end, const T* const* pre,
                                      T* const* post) {
  const auto& d = geometry_.descriptors;
  const NodeType* types = d.types().data() + d.index(0, y);
  const std::ptrdiff_t nx = d.nx();
  int x = x_begin;
  while (x < x_end) {
    const NodeType t = types[x];
    if (t == NodeType::Fluid) {
      const int start = x;
      while (x < x_end && types[x] == NodeType::Fluid) ++x;
      const T* src[9];
      T* dst[9];
      for (std::size_t i = 0; i < 9; ++i) {
        src[i] = pre[i] + (y - kVy[i]) * nx + (start - kVx[i]);
        dst[i] = post[i] + y * nx + start;
      }
      run_(src, dst, static_cast<std::size_t>(x - start), omega_);
    } else {
      if (t != NodeType::Solid) node_dense(x, y, pre, post);
      ++x;
    }
  }
}

template <typename T>
std::uint64_t Simulation<T>::step_dense_rows(bool bitmask) {
  const int pb = field_.physical(BufferRole::Pre);
  const int qb = field_.physical(BufferRole::Post);
  const T* pre[9];
  T* post[9];
  for (int i = 0; i < 9; ++i) {
    pre[i] = field_.plane(pb, i);
    post[i] = field_.plane(qb, i);
  }
  const int nx = field_.nx();
  const int ny = field_.ny();
  std::uint64_t visits = 0;
#pragma omp parallel for schedule(static) num_threads(workers_) reduction(+ : visits) if (workers_ > 1)
  for (int y = 0; y < ny; ++y) {
    if (!bitmask) {
      process_row_range(y, 0, nx, pre, post);
      visits += static_cast<std::uint64_t>(nx);
      continue;
    }
    const std::uint64_t* row = field_.active_row(y);
    for (std::size_t w = 0; w < field_.words_per_row(); ++w) {
      std::uint64_t bits = row[w];
      while (bits != 0) {
        const int s = std::countr_zero(bits);
        const int len = std::countr_one(bits >> s);
        const int a = static_cast<int>(w * 64) + s;
        process_row_range(y, a, a + len, pre, post);
        visits += static_cast<std::uint64_t>(len);
        const std::uint64_t run = len == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << len) - 1);
        bits &= ~(run << s);
      }
    }
  }
  return visits;
}

template <typename T>
void Simulation<T>::node_tile(int x, int y, int pb, int qb) {
  const auto& d = geometry_.descriptors;
  const std::size_t idx = d.index(x, y);
  const std::uint8_t mask = d.masks()[idx];
  TileBlock<T>* here = field_.tile(field_.tile_id(x, y));
  const std::size_t local = PdfField<T>::tile_local(x, y);
  T own[9];
  T f[9];
  for (int i = 0; i < 9; ++i) own[i] = here->f[pb][i][local];
  f[0] = own[0];
  for (int i = 1; i < 9; ++i) {
    if (neighbor_present(mask, d2q9::kOpposite[static_cast<std::size_t>(i)])) {
      const int xu = x - kVx[static_cast<std::size_t>(i)];
      const int yu = y - kVy[static_cast<std::size_t>(i)];
      f[i] = field_.tile(field_.tile_id(xu, yu))->f[pb][i][PdfField<T>::tile_local(xu, yu)];
    }
  }
  const std::int32_t bc = d.bc_indices()[idx];
  resolve_node(f, own, d.types()[idx], mask, bc >= 0 ? &bc_[static_cast<std::size_t>(bc)] : nullptr);
  kernels::collide_node(f, omega_);
  for (int i = 0; i < 9; ++i) here->f[qb][i][local] = f[i];
}

template <typename T>
std::uint64_t Simulation<T>::step_tiles() {
  const int pb = field_.physical(BufferRole::Pre);
  const int qb = field_.physical(BufferRole::Post);
  const auto& ids = field_.allocated_tiles();
  const auto& d = geometry_.descriptors;
  const int nx = field_.nx();
  const int ny = field_.ny();
  const auto tiles_x = static_cast<std::size_t>(field_.tiles_x());
  const auto n_tiles = static_cast<std::ptrdiff_t>(ids.size());
  std::uint64_t visits = 0;
#pragma omp parallel for schedule(static) num_threads(workers_) reduction(+ : visits) if (workers_ > 1)
  for (std::ptrdiff_t k = 0; k < n_tiles; ++k) {
    const std::size_t id = ids[static_cast<std::size_t>(k)];
    const std::size_t tx = id % tiles_x;
    const int x0 = static_cast<int>(tx) * kTileEdge;
    const int y0 = static_cast<int>(id / tiles_x) * kTileEdge;
    const int xe = std::min(x0 + kTileEdge, nx);
    const int ye = std::min(y0 + kTileEdge, ny);
    TileBlock<T>* here = field_.tile(id);
    for (int y = y0; y < ye; ++y) {
      visits += static_cast<std::uint64_t>(xe - x0);
      const NodeType* types = d.types().data() + d.index(0, y);
      int x = x0;
      while (x < xe) {
        const NodeType t = types[x];
        if (t == NodeType::Solid) {
          ++x;
          continue;
        }
        // horizontal neighbours of local columns 1..14 stay inside this tile
        if (t == NodeType::Fluid && x > x0 && x < x0 + kTileEdge - 1) {
          const int start = x;
          while (x < xe && x < x0 + kTileEdge - 1 && types[x] == NodeType::Fluid) ++x;
          const T* src[9];
          T* dst[9];
          for (std::size_t i = 0; i < 9; ++i) {
            const int yu = y - kVy[i];
            const TileBlock<T>* up = field_.tile(static_cast<std::size_t>(yu / kTileEdge) * tiles_x + tx);
            src[i] = up->f[pb][i] + (yu % kTileEdge) * kTileEdge + (start - x0 - kVx[i]);
            dst[i] = here->f[qb][i] + (y - y0) * kTileEdge + (start - x0);
          }
          run_(src, dst, static_cast<std::size_t>(x - start), omega_);
        } else {
          node_tile(x, y, pb, qb);
          ++x;
        }
      }
    }
  }
  return visits;
}

template <typename T>
void Simulation<T>::step() {
  std::uint64_t visits = 0;
  switch (field_.layout()) {
    case LayoutKind::Dense: visits = step_dense_rows(false); break;
    case LayoutKind::BitmaskNode: visits = step_dense_rows(true); break;
    case LayoutKind::Tile:
    case LayoutKind::PointerTile: visits = step_tiles(); break;
  }
  field_.swap_buffers();
  ++step_count_;
  visited_last_ = visits;
  visited_total_ += visits;
  if (divergence_every_ > 0 && step_count_ % divergence_every_ == 0) {
    check_finite();
  }
}

template <typename T>
void Simulation<T>::run(std::int64_t n_steps, std::span<const Observer<T>> observers) {
  if (n_steps < 0) {
    throw InvalidArgument("step count must be non-negative");
  }
  for (std::int64_t s = 0; s < n_steps; ++s) {
    step();
    for (const Observer<T>& obs : observers) {
      if (obs.every <= 0 || step_count_ % obs.every != 0) continue;
      try {
        obs.callback(step_count_, *this);
      } catch (const std::exception& e) {
        throw RunError("observer failed at step " + std::to_string(step_count_) + ": " + e.what());
      }
    }
  }
}

template <typename T>
Pdf9<T> Simulation<T>::node_pre(int x, int y) const {
  Pdf9<T> f{};
  for (int i = 0; i < 9; ++i) {
    f[static_cast<std::size_t>(i)] = field_.read(x, y, i, BufferRole::Pre);
  }
  return f;
}

template <typename T>
MacroFields Simulation<T>::macroscopic_fields() const {
  const auto& d = geometry_.descriptors;
  MacroFields m;
  m.nx = d.nx();
  m.ny = d.ny();
  m.rho.assign(d.size(), 0.0);
  m.ux.assign(d.size(), 0.0);
  m.uy.assign(d.size(), 0.0);
  for (int y = 0; y < d.ny(); ++y) {
    for (int x = 0; x < d.nx(); ++x) {
      if (d.type(x, y) == NodeType::Solid) continue;
      const Pdf9<T> f = node_pre(x, y);
      Pdf9<double> fd{};
      for (std::size_t i = 0; i < 9; ++i) fd[i] = static_cast<double>(f[i]);
      const Moments<double> mo = moments(fd);
      const std::size_t k = m.index(x, y);
      m.rho[k] = mo.rho;
      m.ux[k] = mo.v.x;
      m.uy[k] = mo.v.y;
    }
  }
  return m;
}

template <typename T>
void Simulation<T>::check_finite() const {
  const auto& d = geometry_.descriptors;
  for (int y = 0; y < d.ny(); ++y) {
    for (int x = 0; x < d.nx(); ++x) {
      if (d.type(x, y) == NodeType::Solid) continue;
      for (int i = 0; i < 9; ++i) {
        if (!std::isfinite(field_.read(x, y, i, BufferRole::Pre))) {
          throw DivergenceError(step_count_, x, y);
        }
      }
    }
  }
}

template class Simulation<float>;
template class Simulation<double>;

}  // namespace lbm2d
