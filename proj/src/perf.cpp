#include "lbm2d/perf.hpp"

#include <algorithm>
#include <ostream>

#include "lbm2d/error.hpp"
#include "lbm2d/format.hpp"

namespace lbm2d {

PerfReport make_report(std::string case_id, LayoutKind layout, int scalar_size, std::size_t node_count,
                       std::size_t active_node_count, std::int64_t steps, double wall_seconds,
                       double b_peak) {
  if (scalar_size != 4 && scalar_size != 8) throw InvalidArgument("scalar size must be 4 or 8 bytes");
  if (steps < 1) throw InvalidArgument("timed steps must be at least 1");
  if (!(wall_seconds > 0.0) || !std::isfinite(wall_seconds)) {
    throw InvalidArgument("timed interval must be positive");
  }
  if (!(b_peak >= 0.0) || !std::isfinite(b_peak)) throw InvalidArgument("peak bandwidth must be >= 0");
  PerfReport r;
  r.case_id = std::move(case_id);
  r.layout = layout;
  r.scalar_size = scalar_size;
  r.node_count = node_count;
  r.active_node_count = active_node_count;
  r.steps = steps;
  r.wall_seconds = wall_seconds;
  r.b_peak = b_peak;
  r.p_lups = static_cast<double>(active_node_count) * static_cast<double>(steps) / wall_seconds;
  r.b_node = 2.0 * r.q * r.scalar_size;
  r.p_b = r.b_node * r.p_lups;
  r.u_b = b_peak > 0.0 ? r.p_b / b_peak : 0.0;
  return r;
}

bool is_consistent(const PerfReport& r) {
  const PerfReport f = make_report(r.case_id, r.layout, r.scalar_size, r.node_count, r.active_node_count,
                                   r.steps, r.wall_seconds, r.b_peak);
  return r.q == 9 && f.p_lups == r.p_lups && f.b_node == r.b_node && f.p_b == r.p_b && f.u_b == r.u_b;
}

SecondsClock steady_seconds() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

double steady_resolution() {
  double best = 1.0;
  for (int k = 0; k < 16; ++k) {
    const auto a = std::chrono::steady_clock::now();
    auto b = a;
    while (b == a) b = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(b - a).count());
  }
  return best;
}

template <typename T>
PerfReport benchmark(Simulation<T>& sim, const BenchmarkOptions& opt) {
  if (opt.warmup_steps < 0) throw InvalidArgument("warm-up steps must be >= 0");
  if (opt.timed_steps < 1) throw InvalidArgument("timed steps must be >= 1");
  const SecondsClock clock = opt.clock ? opt.clock : steady_seconds();
  double resolution = opt.clock_resolution;
  if (resolution < 0.0) resolution = opt.clock ? 0.0 : steady_resolution();

  sim.run(opt.warmup_steps);
  const double t0 = clock();
  sim.run(opt.timed_steps);
  const double t1 = clock();

  PerfReport r = make_report(opt.case_id.empty() ? sim.geometry().case_name : opt.case_id, sim.layout(),
                             static_cast<int>(sizeof(T)), sim.nodes().size(), sim.active_node_count(),
                             opt.timed_steps, t1 - t0, opt.b_peak);
  r.isa = std::string(kernels::to_string(sim.isa()));
  r.workers = sim.workers();
  r.warmup_steps = opt.warmup_steps;
  r.timer_warning = resolution > 0.01 * r.wall_seconds;
  return r;
}

template PerfReport benchmark(Simulation<float>&, const BenchmarkOptions&);
template PerfReport benchmark(Simulation<double>&, const BenchmarkOptions&);

double sparse_efficiency(const PerfReport& sparse, const PerfReport& dense) {
  if (sparse.layout != dense.layout) throw InvalidArgument("efficiency needs the same layout");
  if (sparse.node_count != dense.node_count) throw InvalidArgument("efficiency needs the same domain size");
  if (!(dense.p_lups > 0.0)) throw InvalidArgument("dense performance must be positive");
  return sparse.p_lups / dense.p_lups;
}

template <typename T>
CopyBandwidth copy_bandwidth_bench(LayoutKind layout, int n, int passes, const SecondsClock& clock_in) {
  if (n < 1) throw InvalidArgument("domain size must be positive");
  if (passes < 1) throw InvalidArgument("pass count must be >= 1");
  const SecondsClock clock = clock_in ? clock_in : steady_seconds();
  NodeDescriptorField nodes(n, n);
  nodes.recompute_masks();
  PdfField<T> field(nodes, layout);
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);

  auto pass = [&] {
    const int pb = field.physical(BufferRole::Pre);
    const int qb = field.physical(BufferRole::Post);
    switch (layout) {
      case LayoutKind::Dense:
        for (int i = 0; i < 9; ++i) std::copy_n(field.plane(pb, i), count, field.plane(qb, i));
        break;
      case LayoutKind::BitmaskNode:
        for (int y = 0; y < n; ++y) {
          const std::uint64_t* row = field.active_row(y);
          for (std::size_t w = 0; w < field.words_per_row(); ++w) {
            std::uint64_t bits = row[w];
            while (bits != 0) {
              const int s = std::countr_zero(bits);
              const int len = std::countr_one(bits >> s);
              const std::size_t off = static_cast<std::size_t>(y) * static_cast<std::size_t>(n) + w * 64 + s;
              for (int i = 0; i < 9; ++i) std::copy_n(field.plane(pb, i) + off, len, field.plane(qb, i) + off);
              const std::uint64_t run = len == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << len) - 1);
              bits &= ~(run << s);
            }
          }
        }
        break;
      case LayoutKind::Tile:
      case LayoutKind::PointerTile:
        for (std::uint32_t id : field.allocated_tiles()) {
          TileBlock<T>* t = field.tile(id);
          std::copy_n(&t->f[pb][0][0], 9 * kTileNodes, &t->f[qb][0][0]);
        }
        break;
    }
    field.swap_buffers();
  };

  pass();  // touch every page before timing
  const double t0 = clock();
  for (int k = 0; k < passes; ++k) pass();
  const double t1 = clock();

  CopyBandwidth r;
  r.layout = layout;
  r.scalar_size = static_cast<int>(sizeof(T));
  r.bytes_per_pass = 2 * 9 * sizeof(T) * count;
  r.passes = passes;
  r.seconds = t1 - t0;
  r.bytes_per_second = r.seconds > 0.0 ? static_cast<double>(r.bytes_per_pass) * passes / r.seconds : 0.0;
  return r;
}

template CopyBandwidth copy_bandwidth_bench<float>(LayoutKind, int, int, const SecondsClock&);
template CopyBandwidth copy_bandwidth_bench<double>(LayoutKind, int, int, const SecondsClock&);

std::string to_string(Placement p) { return p == Placement::Regular ? "regular" : "random"; }

namespace {

template <typename T>
std::vector<PerfReport> sweep_typed(const SweepConfig& cfg) {
  for (double phi : cfg.porosities) {
    if (!(phi >= 0.1 && phi <= 1.0)) throw InvalidArgument("sweep porosities must lie in [0.1, 1]");
  }
  const FlowParams params = FlowParams::from_viscosity(0.0, cfg.n, cfg.nu);
  const SolverOptions sopt{.workers = cfg.workers};
  BenchmarkOptions bopt;
  bopt.warmup_steps = cfg.warmup_steps;
  bopt.timed_steps = cfg.timed_steps;
  bopt.b_peak = cfg.b_peak;
  bopt.clock = cfg.clock;

  auto measure = [&](const Geometry& g, LayoutKind layout, const std::string& id) {
    Simulation<T> sim(g, layout, params, sopt);
    sim.initialize();
    bopt.case_id = id;
    return benchmark(sim, bopt);
  };

  const Geometry open_domain = build_porous_regular(cfg.n, 1.0);
  std::vector<PerfReport> reference;
  for (LayoutKind layout : cfg.layouts) reference.push_back(measure(open_domain, layout, "open"));

  std::vector<PerfReport> out;
  for (Placement placement : cfg.placements) {
    for (double phi : cfg.porosities) {
      // regular arrays are not built below 0.3
      if (placement == Placement::Regular && phi < 0.3) continue;
      const Geometry g = placement == Placement::Regular ? build_porous_regular(cfg.n, phi)
                                                         : build_porous_random(cfg.n, phi, cfg.seed);
      const std::string id = g.case_name + "@phi=" + format_double(phi);
      for (std::size_t k = 0; k < cfg.layouts.size(); ++k) {
        PerfReport r = measure(g, cfg.layouts[k], id);
        r.eta_p = sparse_efficiency(r, reference[k]);
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<PerfReport> porosity_sweep(const SweepConfig& cfg) {
  return cfg.double_precision ? sweep_typed<double>(cfg) : sweep_typed<float>(cfg);
}

std::string perf_csv_header() {
  return "case_id,layout,isa,workers,s_d,q,node_count,active_node_count,warmup_steps,steps,"
         "wall_seconds,p_lups,b_node,p_b,b_peak,u_b,eta_p,timer_warning";
}

std::string perf_csv_row(const PerfReport& r) {
  std::string s;
  s += r.case_id + ',' + std::string(to_string(r.layout)) + ',' + r.isa + ',' + std::to_string(r.workers);
  s += ',' + std::to_string(r.scalar_size) + ',' + std::to_string(r.q);
  s += ',' + std::to_string(r.node_count) + ',' + std::to_string(r.active_node_count);
  s += ',' + std::to_string(r.warmup_steps) + ',' + std::to_string(r.steps);
  for (double v : {r.wall_seconds, r.p_lups, r.b_node, r.p_b, r.b_peak, r.u_b}) s += ',' + format_double(v);
  s += ',' + (r.eta_p ? format_double(*r.eta_p) : std::string());
  s += r.timer_warning ? ",1" : ",0";
  return s;
}

void write_perf_csv(std::ostream& out, const std::vector<PerfReport>& reports) {
  out << perf_csv_header() << '\n';
  for (const PerfReport& r : reports) out << perf_csv_row(r) << '\n';
}

}  // namespace lbm2d
