#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbm2d/geometry.hpp"
#include "lbm2d/lattice.hpp"
#include "lbm2d/layout.hpp"

namespace lbm2d {

enum class RunMode { Simulate, Bench, Validate, Sweep };
enum class CaseKind { Cavity, ChanV, ChanP, CylinderCircle, CylinderSquare, PorousRegular, PorousRandom };
enum class ColorScale { Linear, Log };

std::string to_string(RunMode m);
std::string to_string(CaseKind c);
std::string to_string(ColorScale s);

/// Everything a run needs. Zero nx/ny select the case's desk-scale default.
struct RunConfig {
  RunMode mode = RunMode::Simulate;
  CaseKind case_kind = CaseKind::Cavity;
  int nx = 0;
  int ny = 0;
  std::optional<double> re;
  std::optional<double> nu;
  double U = 0.1;
  LayoutKind layout = LayoutKind::Dense;
  bool f64 = true;
  std::int64_t steps = 0;
  std::int64_t save_every = 0;  // 0: final snapshot only
  double phi_target = 0.5;
  std::uint64_t seed = 1;
  double b_peak = 0.0;
  std::string output_dir = "out";
  int workers = 0;
  std::string isa = "auto";
  std::int64_t warmup_steps = 100;
  ColorScale color_scale = ColorScale::Log;
  bool paper_scale = false;
  std::int64_t check_every = 10000;
  std::int64_t sample_every = 10;  // cylinder probe cadence
  std::vector<double> porosities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<LayoutKind> sweep_layouts{std::begin(kAllLayouts), std::end(kAllLayouts)};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr std::int64_t kDeskScaleNodes = 1024 * 1024;

using ConfigMap = std::map<std::string, std::string>;

/// Flat "key = value" text; '#' starts a comment. Duplicate keys are errors.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);

/// Builds and validates a config. Throws ConfigError naming the offending key,
/// or listing the missing required keys (mode, case, steps, Re or nu).
RunConfig parse_config(const ConfigMap& kv);
/// File values first, then overrides on top.
RunConfig parse_config(const std::optional<std::filesystem::path>& file, const ConfigMap& overrides);

/// Canonical file form; parse_config(parse_config_text(to_config_text(c))) == c.
std::string to_config_text(const RunConfig& c);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Case defaults applied: resolved domain size.
int resolved_nx(const RunConfig& c);
int resolved_ny(const RunConfig& c);

/// Characteristic length: cavity n_y-1, channel n_y, cylinder diameter, porous n.
double characteristic_length(const RunConfig& c);
FlowParams flow_params(const RunConfig& c);

Geometry build_case_geometry(const RunConfig& c);

/// Cylinder cases: obstacle centre and wake probe location.
struct CylinderLayout {
  Vec2<double> center;
  double diameter = 0.0;
  int probe_x = 0;
  int probe_y = 0;
};
CylinderLayout cylinder_layout(int nx, int ny);

}  // namespace lbm2d
