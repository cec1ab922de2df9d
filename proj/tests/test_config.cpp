#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lbm2d/config.hpp"
#include "lbm2d/error.hpp"
#include "lbm2d/runner.hpp"

using namespace lbm2d;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lbm2d_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const ConfigMap& kv) {
  try {
    parse_config(kv);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

ConfigMap small_cavity(const fs::path& dir) {
  return {{"mode", "simulate"}, {"case", "cavity"}, {"n", "24"},        {"Re", "100"},
          {"U", "0.1"},         {"steps", "40"},    {"save_every", "10"}, {"output_dir", dir.string()},
          {"workers", "1"}};
}

ExecuteHooks quiet(std::ostream& console) {
  ExecuteHooks h;
  h.console = &console;
  return h;
}

SecondsClock scripted(double t0, double t1) {
  auto k = std::make_shared<int>(0);
  return [=] { return (*k)++ == 0 ? t0 : t1; };
}

}  // namespace

TEST_CASE("first cavity table row") {
  const RunConfig c = parse_config(parse_config_text(
      "case = cavity\nmode = validate\nn = 128\nRe = 100\nU = 0.1\nsteps = 12000  # converged\n"));
  CHECK(c.case_kind == CaseKind::Cavity);
  CHECK(resolved_nx(c) == 128);
  CHECK(resolved_ny(c) == 128);
  CHECK(c.steps == 12000);
  const FlowParams p = flow_params(c);
  CHECK(p.L == 127.0);
  CHECK(p.nu == doctest::Approx(0.127).epsilon(1e-12));
  CHECK(p.Re == 100.0);
}

TEST_CASE("config errors") {
  ConfigMap base{{"mode", "simulate"}, {"case", "cavity"}, {"steps", "10"}, {"Re", "100"}};
  CHECK(message_of(base).empty());

  auto both = base;
  both["nu"] = "0.1";
  CHECK(message_of(both).find("exactly one") != std::string::npos);

  const std::string empty = message_of({});
  CHECK(empty == "missing required keys: mode, case, steps, Re or nu");

  auto unknown = base;
  unknown["viscosity"] = "0.1";
  CHECK(message_of(unknown).find("'viscosity'") != std::string::npos);

  for (auto [k, v] : std::vector<std::pair<std::string, std::string>>{{"U", "0.6"},
                                                                       {"U", "-0.1"},
                                                                       {"Re", "-3"},
                                                                       {"steps", "0"},
                                                                       {"steps", "ten"},
                                                                       {"layout", "csr"},
                                                                       {"scalar", "f16"},
                                                                       {"mode", "plot"},
                                                                       {"nx", "4"},
                                                                       {"nx", "2048"},
                                                                       {"isa", "neon"},
                                                                       {"phi_target", "0.05"},
                                                                       {"nx", "12"}}) {
    auto m = base;
    if (k == "nx" && v == "12") m["n"] = "12";
    m[k] = v;
    CAPTURE(k);
    CAPTURE(v);
    CHECK_FALSE(message_of(m).empty());
  }
  auto big = base;
  big["nx"] = "2048";
  big["paper_scale"] = "true";
  CHECK(message_of(big).empty());

  auto regular = base;
  regular["case"] = "porous_regular";
  regular["phi_target"] = "0.2";
  CHECK(message_of(regular).find("phi_target") != std::string::npos);

  auto cyl = base;
  cyl["case"] = "cylinder_circle";
  cyl["nx"] = "300";
  cyl["ny"] = "100";
  CHECK(message_of(cyl).find("nx") != std::string::npos);

  CHECK_THROWS_AS(parse_config_text("mode = bench\nmode = sweep\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("mode bench\n"), ParseError);
}

TEST_CASE("config round trip and hash") {
  RunConfig c = parse_config(small_cavity("out_rt"));
  c.porosities = {0.25, 0.75};
  c.sweep_layouts = {LayoutKind::Tile, LayoutKind::Dense};
  c.color_scale = ColorScale::Linear;
  c.f64 = false;
  c.seed = 1234567890123ull;
  const std::string text = to_config_text(c);
  CHECK(parse_config(parse_config_text(text)) == c);
  CHECK(to_config_text(parse_config(parse_config_text(text))) == text);
  CHECK(config_hash(c).size() == 16);
  CHECK(config_hash(c) == config_hash(parse_config(parse_config_text(text))));
  RunConfig d = c;
  d.seed += 1;
  CHECK(config_hash(d) != config_hash(c));

  RunConfig nu = parse_config({{"mode", "bench"}, {"case", "chan_v"}, {"steps", "5"}, {"nu", "0.25"}});
  CHECK(parse_config(parse_config_text(to_config_text(nu))) == nu);
}

TEST_CASE("flags override file values") {
  const fs::path dir = fresh_dir("override");
  fs::create_directories(dir);
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "mode = simulate\ncase = cavity\nsteps = 100\nnu = 0.1\nn = 64\n";
  const RunConfig a = parse_config(file, {{"steps", "7"}, {"Re", "400"}});
  CHECK(a.steps == 7);
  CHECK(a.re == 400.0);
  CHECK_FALSE(a.nu.has_value());
  const RunConfig b = parse_config(file, {{"nx", "80"}});
  CHECK(b.nx == 80);
  CHECK(b.ny == 64);
  const RunConfig c = parse_config(file, {});
  CHECK(c.nx == 64);
  CHECK(c.ny == 64);
  CHECK_THROWS_AS(parse_config(dir / "missing.cfg", {}), ConfigError);
}

TEST_CASE("simulate writes snapshots at the save cadence") {
  const fs::path dir = fresh_dir("simulate");
  std::ostringstream console;
  const RunConfig c = parse_config(small_cavity(dir));
  CHECK(execute(c, quiet(console)) == kExitOk);
  int csv = 0, png = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snapshot_", 0) != 0) continue;
    csv += e.path().extension() == ".csv";
    png += e.path().extension() == ".png";
  }
  CHECK(csv == 4);
  CHECK(png == 4);
  std::ifstream snap(dir / "snapshot_000000040.csv");
  std::string line;
  std::getline(snap, line);
  CHECK(line == "# config_hash=" + config_hash(c));
  std::getline(snap, line);
  CHECK(line == "x,y,node_type,rho,v_x,v_y");
  int rows = 0;
  while (std::getline(snap, line)) ++rows;
  CHECK(rows == 24 * 24);

  auto kv = small_cavity(fresh_dir("simulate_final"));
  kv["save_every"] = "0";
  CHECK(execute(parse_config(kv), quiet(console)) == kExitOk);
  CHECK(fs::exists(fs::path(kv["output_dir"]) / "snapshot_000000040.png"));
}

TEST_CASE("identical configs give identical artifacts") {
  const fs::path a = fresh_dir("repro_a");
  const fs::path b = fresh_dir("repro_b");
  std::ostringstream console;
  auto ka = small_cavity(a);
  auto kb = small_cavity(b);
  ka["output_dir"] = kb["output_dir"] = "repro_out";
  const fs::path cwd = fs::current_path();
  fs::create_directories(a);
  fs::create_directories(b);
  fs::current_path(a);
  CHECK(execute(parse_config(ka), quiet(console)) == kExitOk);
  fs::current_path(b);
  CHECK(execute(parse_config(kb), quiet(console)) == kExitOk);
  fs::current_path(cwd);

  const fs::path ra = a / "repro_out";
  const fs::path rb = b / "repro_out";
  int compared = 0;
  for (const auto& e : fs::directory_iterator(ra)) {
    const std::string name = e.path().filename().string();
    if (name == "run.log") continue;
    CAPTURE(name);
    CHECK(slurp(e.path()) == slurp(rb / name));
    ++compared;
  }
  CHECK(compared == 10);
}

TEST_CASE("every artifact carries the config hash") {
  const fs::path dir = fresh_dir("hash");
  std::ostringstream console;
  const RunConfig c = parse_config(small_cavity(dir));
  REQUIRE(execute(c, quiet(console)) == kExitOk);
  const std::string hash = config_hash(c);
  for (const auto& e : fs::directory_iterator(dir)) {
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()).find(hash) != std::string::npos);
  }
}

TEST_CASE("bench with an injected clock") {
  const fs::path dir = fresh_dir("bench");
  std::ostringstream console;
  const RunConfig c = parse_config({{"mode", "bench"},
                                    {"case", "cavity"},
                                    {"n", "32"},
                                    {"nu", "0.1"},
                                    {"steps", "50"},
                                    {"warmup_steps", "5"},
                                    {"scalar", "f32"},
                                    {"B_peak", "1e9"},
                                    {"workers", "1"},
                                    {"output_dir", dir.string()}});
  ExecuteHooks hooks = quiet(console);
  hooks.clock = scripted(2.0, 2.25);
  hooks.clock_resolution = 0.0;
  REQUIRE(execute(c, hooks) == kExitOk);
  std::ifstream in(dir / "perf.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config_hash=" + config_hash(c));
  std::getline(in, line);
  CHECK(line == perf_csv_header());
  std::getline(in, line);
  const PerfReport expect = make_report("cavity", LayoutKind::Dense, 4, 1024, 1024, 50, 0.25, 1e9);
  // 32^2 * 50 / 0.25 = 204800 LUPS, times 72 bytes
  CHECK(expect.p_lups == 204800.0);
  CHECK(expect.p_b == 14745600.0);
  CHECK(line.find(",204800,72,14745600,1e+09,0.0147456,,0") != std::string::npos);
}

TEST_CASE("exit categories") {
  std::ostringstream console;
  auto kv = small_cavity(fresh_dir("diverge"));
  kv.erase("Re");
  kv["nu"] = "0.0001";
  kv["U"] = "0.45";
  kv["steps"] = "4000";
  kv["check_every"] = "100";
  kv["save_every"] = "0";
  CHECK(execute(parse_config(kv), quiet(console)) == kExitDivergence);
  CHECK(console.str().find("divergence") != std::string::npos);

  const fs::path blocker = fresh_dir("blocker");
  std::ofstream(blocker) << "a file, not a directory";
  auto io = small_cavity(blocker / "sub");
  CHECK(execute(parse_config(io), quiet(console)) == kExitIoError);

  auto noref = small_cavity(fresh_dir("noref"));
  noref["mode"] = "validate";
  noref["Re"] = "150";
  CHECK(execute(parse_config(noref), quiet(console)) == kExitConfigError);

  auto isa = small_cavity(fresh_dir("isa"));
  isa["isa"] = "scalar";
  CHECK(execute(parse_config(isa), quiet(console)) == kExitOk);
}

TEST_CASE("validate writes comparison records") {
  const fs::path dir = fresh_dir("validate");
  std::ostringstream console;
  const RunConfig c = parse_config({{"mode", "validate"},
                                    {"case", "chan_p"},
                                    {"nx", "200"},
                                    {"ny", "16"},
                                    {"nu", "0.25"},
                                    {"steps", "6000"},
                                    {"workers", "1"},
                                    {"output_dir", dir.string()}});
  CHECK(execute(c, quiet(console)) == kExitOk);
  const std::string v = slurp(dir / "validation.csv");
  CHECK(v.find("case,metric,value,threshold,pass") != std::string::npos);
  CHECK(v.find("chan_p,residual,") != std::string::npos);
  CHECK(fs::exists(dir / "profile_cross.csv"));
}

TEST_CASE("colormap endpoints") {
  CHECK(colormap(0.0) == std::array<std::uint8_t, 3>{68, 1, 84});
  CHECK(colormap(1.0) == std::array<std::uint8_t, 3>{253, 231, 37});
  CHECK(colormap(0.5) == std::array<std::uint8_t, 3>{33, 145, 140});
  CHECK(colormap(-1.0) == colormap(0.0));
  CHECK(colormap(2.0) == colormap(1.0));
}
