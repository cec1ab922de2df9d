#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lbm2d/boundary.hpp"
#include "lbm2d/geometry.hpp"
#include "lbm2d/kernels/dispatch.hpp"
#include "lbm2d/lattice.hpp"
#include "lbm2d/layout.hpp"

namespace lbm2d {

/// Per-node density and velocity, row-major. Solid nodes hold zeros.
struct MacroFields {
  int nx = 0;
  int ny = 0;
  std::vector<double> rho;
  std::vector<double> ux;
  std::vector<double> uy;

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x);
  }
};

struct SolverOptions {
  int workers = 0;  // 0: all available
  kernels::Isa isa = kernels::default_isa();
  /// Scan for non-finite values every this many steps; 0 disables the scan.
  std::int64_t divergence_check_every = 0;
};

inline constexpr std::int64_t kDefaultDivergenceCheckEvery = 10000;

template <typename T>
class Simulation;

template <typename T>
struct Observer {
  std::int64_t every = 1;
  std::function<void(std::int64_t step, const Simulation<T>& sim)> callback;
};

/// Fused pull-scheme stream-collide over a static geometry.
template <typename T>
class Simulation {
public:
  Simulation(Geometry geometry, LayoutKind layout, FlowParams params, SolverOptions options = {});

  /// Case defaults: interior rho0 = geometry.initial_density at rest, velocity
  /// boundary nodes at their imposed velocity, pressure nodes at their density.
  void initialize();
  void initialize(double rho0, Vec2<double> v0);
  /// Per-node initial state; called for non-solid nodes only.
  void initialize(const std::function<Moments<double>(int x, int y)>& state);

  void step();
  void run(std::int64_t n_steps, std::span<const Observer<T>> observers = {});

  MacroFields macroscopic_fields() const;
  Pdf9<T> node_pre(int x, int y) const;

  const Geometry& geometry() const noexcept { return geometry_; }
  const NodeDescriptorField& nodes() const noexcept { return geometry_.descriptors; }
  const PdfField<T>& field() const noexcept { return field_; }
  PdfField<T>& field() noexcept { return field_; }
  const FlowParams& params() const noexcept { return params_; }
  LayoutKind layout() const noexcept { return field_.layout(); }
  kernels::Isa isa() const noexcept { return isa_; }
  int workers() const noexcept { return workers_; }
  std::int64_t step_count() const noexcept { return step_count_; }

  /// Nodes visited by the kernel in the last step / since initialisation.
  std::uint64_t visited_last_step() const noexcept { return visited_last_; }
  std::uint64_t visited_total() const noexcept { return visited_total_; }
  std::size_t active_node_count() const noexcept { return active_nodes_; }

  /// Throws DivergenceError naming the first non-finite node.
  void check_finite() const;

private:
  std::uint64_t step_dense_rows(bool bitmask);
  std::uint64_t step_tiles();
  void process_row_range(int y, int x_begin, int x_end, const T* const* pre, T* const* post);
  void node_dense(int x, int y, const T* const* pre, T* const* post);
  void node_tile(int x, int y, int pb, int qb);

  Geometry geometry_;
  PdfField<T> field_;
  FlowParams params_;
  T omega_;
  std::vector<BoundaryValueT<T>> bc_;
  kernels::Isa isa_;
  kernels::RunKernel<T> run_;
  int workers_;
  std::int64_t divergence_every_;
  std::int64_t step_count_ = 0;
  std::uint64_t visited_last_ = 0;
  std::uint64_t visited_total_ = 0;
  std::size_t active_nodes_ = 0;
};

extern template class Simulation<float>;
extern template class Simulation<double>;

}  // namespace lbm2d
