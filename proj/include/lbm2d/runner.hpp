#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "lbm2d/config.hpp"
#include "lbm2d/perf.hpp"
#include "lbm2d/solver.hpp"

namespace lbm2d {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfigError = 2,
  kExitDivergence = 3,
  kExitIoError = 4,
};

inline constexpr double kGhiaMaxAbsError = 0.03;
inline constexpr double kGhiaMaxMse = 5e-4;
inline constexpr double kPoiseuilleMaxResidual = 1e-3;

struct ExecuteHooks {
  SecondsClock clock;              // bench/sweep timing; empty: steady clock
  double clock_resolution = -1.0;  // < 0: measured
  std::ostream* console = nullptr; // progress and warnings; null: std::cerr
};

/// Runs one configuration and writes its artifacts to output_dir:
///   config.txt               effective config (+ derived Re, nu, omega)
///   run.log                  timestamps; the only non-reproducible file
///   geometry.txt             simulate, validate
///   snapshot_<step>.csv/png  simulate, every save_every steps (or once at the end)
///   perf.csv                 bench
///   validation.csv           validate (+ profile CSVs for cavity and channel)
///   sweep.csv                sweep
/// Returns an ExitCode.
int execute(const RunConfig& config, const ExecuteHooks& hooks = {});

/// Header "x,y,node_type,rho,v_x,v_y", one row per node, y-major. Preceded by
/// a "# config_hash=<hash>" line.
void write_snapshot_csv(const std::filesystem::path& path, const Geometry& g, const MacroFields& m,
                        const std::string& hash);

/// Piecewise-linear five-stop colormap (dark violet, blue, teal, green, yellow), t in [0, 1].
std::array<std::uint8_t, 3> colormap(double t);

/// |v| image, north up, solid nodes black. The log scale spans
/// [1e-6 U, max |v|]; the linear scale [0, max |v|]. The hash goes into a tEXt chunk.
void write_speed_png(const std::filesystem::path& path, const Geometry& g, const MacroFields& m, double U,
                     ColorScale scale, const std::string& hash);

}  // namespace lbm2d
