#include "lbm2d/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <png.h>

#include "lbm2d/error.hpp"
#include "lbm2d/format.hpp"
#include "lbm2d/validation.hpp"

namespace lbm2d {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw ResourceError("write failed: " + path.string());
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string step_name(std::int64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%09lld", static_cast<long long>(step));
  return buf;
}

struct Context {
  const RunConfig& cfg;
  const ExecuteHooks& hooks;
  std::ostream& console;
  std::ofstream& log;
  fs::path dir;
  std::string hash;

  void note(const std::string& msg) {
    log << timestamp() << ' ' << msg << '\n';
    log.flush();
  }
};

struct Record {
  std::string metric;
  std::string value;
  std::string threshold;
  bool pass = true;
};

bool write_validation(Context& ctx, const std::vector<Record>& records) {
  const fs::path path = ctx.dir / "validation.csv";
  std::ofstream out = open_out(path);
  out << "# config_hash=" << ctx.hash << '\n';
  out << "case,metric,value,threshold,pass\n";
  bool ok = true;
  for (const Record& r : records) {
    out << to_string(ctx.cfg.case_kind) << ',' << r.metric << ',' << r.value << ',' << r.threshold << ','
        << (r.pass ? 1 : 0) << '\n';
    ctx.console << "  " << r.metric << " = " << r.value << (r.threshold.empty() ? "" : "  (limit " + r.threshold + ")")
                << (r.pass ? "" : "  FAIL") << '\n';
    ok = ok && r.pass;
  }
  finish(out, path);
  return ok;
}

void write_profile(Context& ctx, const std::string& name, const Profile& p, const char* coord, const char* value) {
  const fs::path path = ctx.dir / name;
  std::ofstream out = open_out(path);
  out << "# config_hash=" << ctx.hash << '\n' << coord << ',' << value << '\n';
  for (std::size_t k = 0; k < p.size(); ++k) out << format_double(p.coord[k]) << ',' << format_double(p.value[k]) << '\n';
  finish(out, path);
}

template <typename T>
SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.workers = c.workers;
  if (c.isa != "auto") {
    const auto isa = kernels::parse_isa(c.isa);
    if (!isa || !kernels::isa_available(*isa)) throw ConfigError("'isa': " + c.isa + " is not available here");
    o.isa = *isa;
  }
  o.divergence_check_every = c.check_every;
  return o;
}

void save_case_geometry(Context& ctx, Geometry g) {
  g.parameters += (g.parameters.empty() ? "" : " ") + std::string("config_hash=") + ctx.hash;
  save_geometry(g, ctx.dir / "geometry.txt");
}

template <typename T>
int simulate(Context& ctx, const Geometry& g, const FlowParams& params) {
  save_case_geometry(ctx, g);
  Simulation<T> sim(g, ctx.cfg.layout, params, solver_options<T>(ctx.cfg));
  sim.initialize();
  int written = 0;
  auto snapshot = [&](std::int64_t step, const Simulation<T>& s) {
    const MacroFields m = s.macroscopic_fields();
    const std::string stem = "snapshot_" + step_name(step);
    write_snapshot_csv(ctx.dir / (stem + ".csv"), g, m, ctx.hash);
    write_speed_png(ctx.dir / (stem + ".png"), g, m, params.U, ctx.cfg.color_scale, ctx.hash);
    ++written;
  };
  std::vector<Observer<T>> obs;
  if (ctx.cfg.save_every > 0) obs.push_back({ctx.cfg.save_every, snapshot});
  sim.run(ctx.cfg.steps, obs);
  sim.check_finite();
  if (ctx.cfg.save_every == 0 || ctx.cfg.steps % ctx.cfg.save_every != 0) snapshot(sim.step_count(), sim);
  ctx.console << "simulate: " << sim.step_count() << " steps, " << written << " snapshot(s)\n";
  ctx.note("simulate done, snapshots=" + std::to_string(written));
  return kExitOk;
}

template <typename T>
int bench(Context& ctx, const Geometry& g, const FlowParams& params) {
  Simulation<T> sim(g, ctx.cfg.layout, params, solver_options<T>(ctx.cfg));
  sim.initialize();
  BenchmarkOptions b;
  b.warmup_steps = ctx.cfg.warmup_steps;
  b.timed_steps = ctx.cfg.steps;
  b.b_peak = ctx.cfg.b_peak;
  b.clock = ctx.hooks.clock;
  b.clock_resolution = ctx.hooks.clock_resolution;
  const PerfReport r = benchmark(sim, b);
  sim.check_finite();
  const fs::path path = ctx.dir / "perf.csv";
  std::ofstream out = open_out(path);
  out << "# config_hash=" << ctx.hash << '\n';
  write_perf_csv(out, {r});
  finish(out, path);
  ctx.console << "bench: " << format_double(r.p_lups / 1e6) << " MLUPS, " << format_double(r.p_b / 1e9) << " GB/s"
              << (r.timer_warning ? " (timer resolution above 1% of the interval)" : "") << '\n';
  ctx.note("bench done");
  return kExitOk;
}

template <typename T>
int validate(Context& ctx, const Geometry& g, const FlowParams& params) {
  save_case_geometry(ctx, g);
  const RunConfig& c = ctx.cfg;
  Simulation<T> sim(g, c.layout, params, solver_options<T>(c));
  sim.initialize();
  std::vector<Record> records;

  if (c.case_kind == CaseKind::CylinderCircle || c.case_kind == CaseKind::CylinderSquare) {
    const CylinderLayout l = cylinder_layout(g.nx(), g.ny());
    std::vector<double> series;
    std::vector<Observer<T>> obs{{c.sample_every, [&](std::int64_t, const Simulation<T>& s) {
                                    const auto f = s.node_pre(l.probe_x, l.probe_y);
                                    Pdf9<double> fd{};
                                    for (std::size_t i = 0; i < 9; ++i) fd[i] = static_cast<double>(f[i]);
                                    series.push_back(moments(fd).v.y);
                                  }}};
    sim.run(c.steps, obs);
    sim.check_finite();
    const WakeClassification w =
        wake_classifier(series, params.U > 0 ? params.U : 1.0, static_cast<double>(c.sample_every));
    records.push_back({"wake_regime", to_string(w.regime), "", true});
    records.push_back({"peak_to_peak", format_double(w.peak_to_peak), "", true});
    records.push_back({"period_steps", format_double(w.period), "", true});
    return write_validation(ctx, records) ? kExitOk : kExitValidationFailed;
  }

  sim.run(c.steps);
  sim.check_finite();
  const MacroFields m = sim.macroscopic_fields();

  if (c.case_kind == CaseKind::Cavity) {
    const double re = std::round(params.Re);
    const GhiaReferenceTable& table = GhiaReferenceTable::builtin();
    if (std::abs(params.Re - re) > 1e-6 * re || !table.contains(static_cast<int>(re))) {
      throw ConfigError("no Ghia reference data for Re = " + format_double(params.Re));
    }
    const GhiaProfiles p = centerline_profiles(g, m, params.U);
    write_profile(ctx, "profile_vx.csv", p.vx_vs_y, "y", "v_x");
    write_profile(ctx, "profile_vy.csv", p.vy_vs_x, "x", "v_y");
    const ProfileComparison cmp = compare_to_ghia(p, static_cast<int>(re), table);
    records.push_back({"mse", format_double(cmp.mse), format_double(kGhiaMaxMse), cmp.mse <= kGhiaMaxMse});
    records.push_back({"max_abs_err", format_double(cmp.max_abs_err), format_double(kGhiaMaxAbsError),
                       cmp.max_abs_err <= kGhiaMaxAbsError});
    records.push_back({"max_rel_err", format_double(cmp.max_rel_err), "", true});
    records.push_back({"max_rel_at", cmp.max_rel_profile + "@" + format_double(cmp.max_rel_coord), "", true});
  } else if (c.case_kind == CaseKind::ChanV || c.case_kind == CaseKind::ChanP) {
    const double R = 0.5 * g.ny();
    const int x = std::min(static_cast<int>(std::lround(15.0 * R)), g.nx() - 2);
    const Profile p = cross_profile(g, m, x);
    write_profile(ctx, "profile_cross.csv", p, "y", "v_x");
    const PoiseuilleFit fit = poiseuille_fit(p);
    records.push_back({"profile_x", std::to_string(x), "", true});
    records.push_back({"v_max", format_double(fit.v_max), "", true});
    records.push_back({"center", format_double(fit.center), "", true});
    records.push_back({"residual", format_double(fit.residual), format_double(kPoiseuilleMaxResidual),
                       fit.parabolic && fit.residual <= kPoiseuilleMaxResidual});
  } else {
    const double mass = total_mass(sim);
    records.push_back({"porosity", format_double(g.porosity), "", true});
    records.push_back({"total_mass", format_double(mass), "", std::isfinite(mass)});
  }
  return write_validation(ctx, records) ? kExitOk : kExitValidationFailed;
}

int sweep(Context& ctx, const FlowParams& params) {
  SweepConfig s;
  s.layouts = ctx.cfg.sweep_layouts;
  s.porosities = ctx.cfg.porosities;
  s.n = resolved_nx(ctx.cfg);
  s.double_precision = ctx.cfg.f64;
  s.warmup_steps = ctx.cfg.warmup_steps;
  s.timed_steps = ctx.cfg.steps;
  s.b_peak = ctx.cfg.b_peak;
  s.seed = ctx.cfg.seed;
  s.workers = ctx.cfg.workers;
  s.nu = params.nu;
  s.clock = ctx.hooks.clock;
  const auto reports = porosity_sweep(s);
  const fs::path path = ctx.dir / "sweep.csv";
  std::ofstream out = open_out(path);
  out << "# config_hash=" << ctx.hash << '\n';
  write_perf_csv(out, reports);
  finish(out, path);
  ctx.console << "sweep: " << reports.size() << " records\n";
  ctx.note("sweep done");
  return kExitOk;
}

template <typename T>
int dispatch(Context& ctx, const Geometry* g, const FlowParams& params) {
  switch (ctx.cfg.mode) {
    case RunMode::Simulate: return simulate<T>(ctx, *g, params);
    case RunMode::Bench: return bench<T>(ctx, *g, params);
    case RunMode::Validate: return validate<T>(ctx, *g, params);
    case RunMode::Sweep: return sweep(ctx, params);
  }
  return kExitConfigError;
}

}  // namespace

int execute(const RunConfig& cfg, const ExecuteHooks& hooks) {
  std::ostream& console = hooks.console ? *hooks.console : std::cerr;
  std::ofstream log;
  try {
    const fs::path dir = cfg.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ResourceError("cannot create " + dir.string() + ": " + ec.message());
    log.open(dir / "run.log", std::ios::app);
    if (!log) throw ResourceError("cannot open " + (dir / "run.log").string());
    Context ctx{cfg, hooks, console, log, dir, config_hash(cfg)};
    ctx.note("start mode=" + to_string(cfg.mode) + " case=" + to_string(cfg.case_kind) + " hash=" + ctx.hash);

    const FlowParams params = flow_params(cfg);
    {
      const fs::path path = dir / "config.txt";
      std::ofstream out = open_out(path);
      out << "# config_hash=" << ctx.hash << '\n' << to_config_text(cfg);
      out << "# derived: nx=" << resolved_nx(cfg) << " ny=" << resolved_ny(cfg) << " L="
          << format_double(params.L) << " Re=" << format_double(params.Re) << " nu=" << format_double(params.nu)
          << " omega=" << format_double(params.omega) << '\n';
      finish(out, path);
    }
    if (cfg.paper_scale) {
      console << "warning: paper-scale domain " << resolved_nx(cfg) << " x " << resolved_ny(cfg)
              << "; expect long runtimes and large outputs\n";
    }

    std::unique_ptr<Geometry> g;
    if (cfg.mode != RunMode::Sweep) g = std::make_unique<Geometry>(build_case_geometry(cfg));
    const int code = cfg.f64 ? dispatch<double>(ctx, g.get(), params) : dispatch<float>(ctx, g.get(), params);
    ctx.note("exit " + std::to_string(code));
    return code;
  } catch (const ConfigError& e) {
    console << "config error: " << e.what() << '\n';
    if (log) log << timestamp() << " config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParseError& e) {
    console << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidArgument& e) {
    console << "config error: " << e.what() << '\n';
    if (log) log << timestamp() << " config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DivergenceError& e) {
    console << "numeric divergence: " << e.what() << '\n';
    if (log) log << timestamp() << " divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    console << "I/O error: " << e.what() << '\n';
    if (log) log << timestamp() << " error: " << e.what() << '\n';
    return kExitIoError;
  }
}

void write_snapshot_csv(const fs::path& path, const Geometry& g, const MacroFields& m, const std::string& hash) {
  std::ofstream out = open_out(path);
  out << "# config_hash=" << hash << '\n' << "x,y,node_type,rho,v_x,v_y\n";
  std::string row;
  for (int y = 0; y < g.ny(); ++y) {
    for (int x = 0; x < g.nx(); ++x) {
      const std::size_t k = m.index(x, y);
      row.clear();
      row += std::to_string(x) + ',' + std::to_string(y) + ',' + std::string(to_string(g.descriptors.type(x, y)));
      row += ',' + format_double(m.rho[k]) + ',' + format_double(m.ux[k]) + ',' + format_double(m.uy[k]) + '\n';
      out << row;
    }
  }
  finish(out, path);
}

std::array<std::uint8_t, 3> colormap(double t) {
  static constexpr double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  if (!(t > 0.0)) t = 0.0;
  if (t > 1.0) t = 1.0;
  const double s = t * 4.0;
  const int k = std::min(static_cast<int>(s), 3);
  const double f = s - k;
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    rgb[static_cast<std::size_t>(c)] =
        static_cast<std::uint8_t>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  }
  return rgb;
}

void write_speed_png(const fs::path& path, const Geometry& g, const MacroFields& m, double U, ColorScale scale,
                     const std::string& hash) {
  const int nx = g.nx();
  const int ny = g.ny();
  std::vector<double> speed(static_cast<std::size_t>(nx) * ny, 0.0);
  double vmax = 0.0;
  for (std::size_t k = 0; k < speed.size(); ++k) {
    speed[k] = std::hypot(m.ux[k], m.uy[k]);
    vmax = std::max(vmax, speed[k]);
  }
  const double floor = 1e-6 * (U > 0.0 ? U : (vmax > 0.0 ? vmax : 1.0));
  const double lo = std::log10(floor);
  const double hi = std::log10(std::max(vmax, floor));

  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(nx) * ny * 3, 0);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      if (g.descriptors.type(x, y) == NodeType::Solid) continue;
      const double v = speed[m.index(x, y)];
      double t = 0.0;
      if (scale == ColorScale::Linear) {
        t = vmax > 0.0 ? v / vmax : 0.0;
      } else if (hi > lo) {
        t = (std::log10(std::max(v, floor)) - lo) / (hi - lo);
      }
      const auto rgb = colormap(t);
      const std::size_t p = (static_cast<std::size_t>(ny - 1 - y) * nx + x) * 3;
      std::copy(rgb.begin(), rgb.end(), pixels.begin() + static_cast<std::ptrdiff_t>(p));
    }
  }

  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw ResourceError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw ResourceError("PNG encoding failed: " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(nx), static_cast<png_uint_32>(ny), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::string key = "config_hash";
  std::string value = hash;
  png_text text{};
  text.compression = PNG_TEXT_COMPRESSION_NONE;
  text.key = key.data();
  text.text = value.data();
  png_set_text(png, info, &text, 1);
  png_write_info(png, info);
  for (int r = 0; r < ny; ++r) png_write_row(png, pixels.data() + static_cast<std::size_t>(r) * nx * 3);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw ResourceError("write failed: " + path.string());
}

}  // namespace lbm2d
