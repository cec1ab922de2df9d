#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lbm2d/solver.hpp"

namespace lbm2d {

/// Sampled velocity component against a coordinate, coordinates ascending.
struct Profile {
  std::vector<double> coord;
  std::vector<double> value;
  std::size_t size() const noexcept { return coord.size(); }
};

/// Linear interpolation; clamps outside the sampled range.
double interpolate(const Profile& p, double at);

struct GhiaProfiles {
  Profile vx_vs_y;  // vertical centreline
  Profile vy_vs_x;  // horizontal centreline
};

/// Ghia, Ghia & Shin (1982) cavity centreline samples, keyed by Reynolds number.
class GhiaReferenceTable {
public:
  /// Blocks of "re <Re> <u|v>" followed by "coordinate value" rows; '#' starts
  /// a comment. Coordinates must ascend strictly and the u block must end at (1, 1).
  static GhiaReferenceTable load(const std::filesystem::path& path);
  /// data/ghia1982.dat from the source tree, or $LBM2D_DATA_DIR/ghia1982.dat.
  static const GhiaReferenceTable& builtin();

  bool contains(int re) const { return table_.count(re) != 0; }
  const GhiaProfiles& at(int re) const;
  std::vector<int> reynolds_numbers() const;

private:
  std::map<int, GhiaProfiles> table_;
};

/// Interior samples farther than `threshold` from the line through their
/// neighbours. Removed worst-first, so one bad sample does not drag its neighbours in.
std::vector<std::size_t> find_outliers(const Profile& p, double threshold = 0.5);

/// v_x on the vertical and v_y on the horizontal mid-line, both ends pinned to
/// the no-slip walls. Coordinates are wall-to-wall fractions: bounce-back walls
/// lie half a link outside the border nodes, the lid lies on the top row.
/// Velocities are divided by U (U = 0 leaves them unscaled).
GhiaProfiles centerline_profiles(const Geometry& g, const MacroFields& m, double U);

template <typename T>
GhiaProfiles centerline_profiles(const Simulation<T>& sim) {
  return centerline_profiles(sim.geometry(), sim.macroscopic_fields(), sim.params().U);
}

struct ProfileComparison {
  double mse = 0.0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::string max_rel_profile;  // "vx" or "vy"
  double max_rel_coord = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  std::size_t excluded = 0;
};

/// Errors at the reference sample points, simulated profile interpolated
/// linearly. Relative error skips reference values of zero.
ProfileComparison compare_to_ghia(const GhiaProfiles& sim, int re,
                                  const GhiaReferenceTable& table = GhiaReferenceTable::builtin(),
                                  bool exclude_outliers = false);

/// v_x over y at column x, non-solid nodes only.
Profile cross_profile(const Geometry& g, const MacroFields& m, int x);

struct PoiseuilleFit {
  double v_max = 0.0;
  double center = 0.0;
  double residual = 1.0;  // 1 - R^2
  bool parabolic = false;  // concave fit with a positive peak
};

/// Least-squares parabola v = a + b y + c y^2.
PoiseuilleFit poiseuille_fit(const Profile& p);

template <typename T>
double total_mass(const Simulation<T>& sim) {
  const auto& d = sim.nodes();
  double sum = 0.0;
  for (int y = 0; y < d.ny(); ++y) {
    for (int x = 0; x < d.nx(); ++x) {
      if (d.type(x, y) == NodeType::Solid) continue;
      const auto f = sim.node_pre(x, y);
      for (T v : f) sum += static_cast<double>(v);
    }
  }
  return sum;
}

enum class WakeRegime { Steady, Oscillatory };

struct WakeClassification {
  WakeRegime regime = WakeRegime::Steady;
  double peak_to_peak = 0.0;
  double period = std::numeric_limits<double>::quiet_NaN();  // in steps; NaN if < 2 crossings
};

inline constexpr double kMinWakeCoverageSteps = 1e4;

/// series[k] sampled every `sample_every` steps. The first transient_fraction
/// of the samples is dropped; the rest must span at least 10^4 steps.
WakeClassification wake_classifier(std::span<const double> series, double U,
                                   double sample_every = 1.0, double transient_fraction = 0.5);

std::string to_string(WakeRegime r);

}  // namespace lbm2d
