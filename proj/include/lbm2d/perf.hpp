#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iterator>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbm2d/solver.hpp"

namespace lbm2d {

struct PerfReport {
  std::string case_id;
  LayoutKind layout = LayoutKind::Dense;
  std::string isa;
  int workers = 1;
  int scalar_size = 4;  // s_d, bytes
  int q = 9;
  std::size_t node_count = 0;
  std::size_t active_node_count = 0;
  std::int64_t warmup_steps = 0;
  std::int64_t steps = 0;
  double wall_seconds = 0.0;
  double p_lups = 0.0;  // active-node updates per second
  double b_node = 0.0;  // 2 q s_d
  double p_b = 0.0;     // b_node * p_lups
  double b_peak = 0.0;
  double u_b = 0.0;     // p_b / b_peak
  std::optional<double> eta_p;
  bool timer_warning = false;  // clock resolution above 1% of the timed interval
};

/// Fills the derived fields from the primaries.
PerfReport make_report(std::string case_id, LayoutKind layout, int scalar_size, std::size_t node_count,
                       std::size_t active_node_count, std::int64_t steps, double wall_seconds,
                       double b_peak);

/// Derived fields equal a fresh recomputation, bit for bit.
bool is_consistent(const PerfReport& r);

/// Monotonic seconds. Tests substitute a scripted clock.
using SecondsClock = std::function<double()>;
SecondsClock steady_seconds();
/// Smallest observable tick of steady_seconds().
double steady_resolution();

inline constexpr std::int64_t kDefaultWarmupSteps = 100;
inline constexpr std::int64_t kDefaultTimedSteps = 1000;

struct BenchmarkOptions {
  std::int64_t warmup_steps = kDefaultWarmupSteps;
  std::int64_t timed_steps = kDefaultTimedSteps;
  double b_peak = 0.0;  // bytes/s; 0 leaves U_B at 0
  std::string case_id;
  SecondsClock clock;         // empty: steady clock
  double clock_resolution = -1.0;  // < 0: measured
};

template <typename T>
PerfReport benchmark(Simulation<T>& sim, const BenchmarkOptions& opt);

extern template PerfReport benchmark(Simulation<float>&, const BenchmarkOptions&);
extern template PerfReport benchmark(Simulation<double>&, const BenchmarkOptions&);

/// P_LUPS(sparse) / P_LUPS(dense) for equal layout and domain size.
double sparse_efficiency(const PerfReport& sparse, const PerfReport& dense);

struct CopyBandwidth {
  LayoutKind layout = LayoutKind::Dense;
  int scalar_size = 4;
  std::size_t bytes_per_pass = 0;  // read + write
  int passes = 0;
  double seconds = 0.0;
  double bytes_per_second = 0.0;
};

/// Copies the pre buffer into the post buffer through the layout's storage
/// order, with no arithmetic. All nodes of an n x n fluid domain take part.
template <typename T>
CopyBandwidth copy_bandwidth_bench(LayoutKind layout, int n, int passes, const SecondsClock& clock = {});

enum class Placement { Regular, Random };
std::string to_string(Placement p);

struct SweepConfig {
  std::vector<LayoutKind> layouts{std::begin(kAllLayouts), std::end(kAllLayouts)};
  std::vector<double> porosities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<Placement> placements{Placement::Regular, Placement::Random};
  int n = 1024;
  bool double_precision = false;
  std::int64_t warmup_steps = kDefaultWarmupSteps;
  std::int64_t timed_steps = kDefaultTimedSteps;
  double b_peak = 0.0;
  std::uint64_t seed = 1;
  int workers = 0;
  double nu = 0.5;
  SecondsClock clock;
};

/// One report per (placement, porosity, layout). eta_p is relative to the
/// obstacle-free domain of the same size and layout.
std::vector<PerfReport> porosity_sweep(const SweepConfig& cfg);

/// Flat records: one header row, then one row per report. Doubles are printed
/// in shortest round-trip form.
std::string perf_csv_header();
std::string perf_csv_row(const PerfReport& r);
void write_perf_csv(std::ostream& out, const std::vector<PerfReport>& reports);

}  // namespace lbm2d
