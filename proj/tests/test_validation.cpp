#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lbm2d/error.hpp"
#include "lbm2d/validation.hpp"

using namespace lbm2d;

namespace {

// Sum of squared values and count for one Re, read with a separate minimal parser.
std::pair<double, int> squares_from_file(int re) {
  std::ifstream in(std::filesystem::path(LBM2D_DATA_DIR) / "ghia1982.dat");
  std::string line;
  bool on = false;
  double sum = 0;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("re ", 0) == 0) {
      on = std::stoi(line.substr(3)) == re;
      continue;
    }
    if (!on) continue;
    std::istringstream ss(line);
    double c, v;
    ss >> c >> v;
    sum += v * v;
    ++n;
  }
  return {sum, n};
}

Profile constant(double v) { return {{0.0, 1.0}, {v, v}}; }

std::filesystem::path scratch(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("reference table ingests all five Reynolds numbers") {
  const auto& t = GhiaReferenceTable::builtin();
  CHECK(t.reynolds_numbers() == std::vector<int>{100, 1000, 3200, 5000, 10000});
  for (int re : t.reynolds_numbers()) {
    const auto& g = t.at(re);
    CHECK(g.vx_vs_y.size() == 17);
    CHECK(g.vy_vs_x.size() == 17);
    CHECK(g.vx_vs_y.coord.back() == 1.0);
    CHECK(g.vx_vs_y.value.back() == 1.0);
    CHECK(g.vx_vs_y.value.front() == 0.0);
    CHECK(g.vy_vs_x.value.front() == 0.0);
    CHECK(g.vy_vs_x.value.back() == 0.0);
  }
  CHECK_THROWS_AS(t.at(400), InvalidArgument);
}

TEST_CASE("only the known Re = 3200 sample is an outlier") {
  const auto& t = GhiaReferenceTable::builtin();
  int total = 0;
  for (int re : t.reynolds_numbers()) {
    const auto u = find_outliers(t.at(re).vx_vs_y);
    const auto v = find_outliers(t.at(re).vy_vs_x);
    total += static_cast<int>(u.size() + v.size());
    if (re == 3200) {
      REQUIRE(u.size() == 1);
      CHECK(t.at(re).vx_vs_y.coord[u[0]] == 0.4531);
      CHECK(std::abs(t.at(re).vx_vs_y.value[u[0]]) == 0.86636);
    }
  }
  CHECK(total == 1);
}

TEST_CASE("malformed reference tables are rejected") {
  CHECK_THROWS_AS(GhiaReferenceTable::load(scratch("g1.dat", "re 100 u\n0 0\n0.5 1 2\n")), ParseError);
  CHECK_THROWS_AS(GhiaReferenceTable::load(scratch("g2.dat", "re 100 u\n0.5 0\n0.2 0.1\n1 1\nre 100 v\n0 0\n1 0\n")),
                  ParseError);
  CHECK_THROWS_AS(GhiaReferenceTable::load(scratch("g3.dat", "re 100 u\n0 0\n1 0.9\nre 100 v\n0 0\n1 0\n")),
                  ParseError);
  CHECK_THROWS_AS(GhiaReferenceTable::load(scratch("g4.dat", "0 0\n")), ParseError);
  CHECK_NOTHROW(GhiaReferenceTable::load(scratch("g5.dat", "# ok\nre 7 u\n0 0\n1 1\nre 7 v\n0 0\n1 0\n")));
  CHECK_THROWS_AS(GhiaReferenceTable::load("/nonexistent/ghia.dat"), ResourceError);
}

TEST_CASE("comparison against the table") {
  const auto& t = GhiaReferenceTable::builtin();
  const GhiaProfiles self = t.at(100);
  const auto c = compare_to_ghia(self, 100, t);
  CHECK(c.mse == 0.0);
  CHECK(c.max_abs_err == 0.0);
  CHECK(c.n == 34);

  const GhiaProfiles zero{constant(0), constant(0)};
  const auto z = compare_to_ghia(zero, 100, t);
  const auto [sum, n] = squares_from_file(100);
  CHECK(n == 34);
  CHECK(z.mse == doctest::Approx(sum / n).epsilon(1e-14));
  CHECK(z.max_abs_err == 1.0);
  CHECK(z.max_rel_err == 1.0);

  // the outlier dominates Re = 3200 unless excluded
  const GhiaProfiles r3200 = t.at(3200);
  GhiaProfiles smooth = r3200;
  smooth.vx_vs_y.value[7] = -0.15;
  const auto with = compare_to_ghia(smooth, 3200, t);
  const auto without = compare_to_ghia(smooth, 3200, t, true);
  CHECK(with.max_abs_err > 0.7);
  CHECK(without.max_abs_err == 0.0);
  CHECK(without.excluded == 1);
  CHECK(with.max_rel_profile == "vx");
  CHECK(with.max_rel_coord == 0.4531);

  CHECK_THROWS_AS(compare_to_ghia(self, 400, t), InvalidArgument);
}

TEST_CASE("comparison treats both profiles alike") {
  const auto& t = GhiaReferenceTable::builtin();
  GhiaProfiles a = t.at(1000);
  GhiaProfiles b = t.at(1000);
  for (double& v : a.vx_vs_y.value) v += 0.01;
  for (double& v : b.vy_vs_x.value) v += 0.01;
  CHECK(compare_to_ghia(a, 1000, t).mse == doctest::Approx(compare_to_ghia(b, 1000, t).mse).epsilon(1e-12));
}

TEST_CASE("centreline profiles of a fresh cavity") {
  Geometry g = build_cavity(33, 33, 0.1);
  Simulation<double> sim(g, LayoutKind::Dense, FlowParams::from_reynolds(0.1, 32, 100), {.workers = 1});
  sim.initialize();
  const auto p = centerline_profiles(sim);
  REQUIRE(p.vx_vs_y.size() == 34);
  REQUIRE(p.vy_vs_x.size() == 35);
  CHECK(p.vx_vs_y.coord[1] == 0.5 / 32.5);
  CHECK(p.vy_vs_x.coord[1] == 0.5 / 33);
  for (int k = 0; k < 32; ++k) CHECK(p.vx_vs_y.value[static_cast<std::size_t>(k)] == 0.0);
  CHECK(p.vx_vs_y.value.back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.vx_vs_y.coord.back() == 1.0);
  for (double v : p.vy_vs_x.value) CHECK(v == 0.0);

  Simulation<double> still(build_cavity(16, 16, 0.0), LayoutKind::Dense, FlowParams::from_viscosity(0.0, 15, 0.1));
  still.initialize();
  still.run(10);
  const auto q = centerline_profiles(still);
  for (double v : q.vx_vs_y.value) CHECK(v == 0.0);

  Simulation<double> chan(build_channel(40, 16, VelocityInlet{}), LayoutKind::Dense, FlowParams::from_viscosity(0.1, 16, 0.1));
  chan.initialize();
  CHECK_THROWS_AS(centerline_profiles(chan), InvalidArgument);
}

TEST_CASE("centreline coordinates are wall-to-wall fractions") {
  // velocity equal to the physical position: walls at -0.5 and n-0.5, lid on the top row
  for (int n : {16, 17, 64}) {
    const Geometry g = build_cavity(n, n, 0.1);
    MacroFields m{n, n, std::vector<double>(n * n, 1.0), std::vector<double>(n * n), std::vector<double>(n * n)};
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        m.ux[m.index(x, y)] = 0.1 * (y + 0.5) / (n - 0.5);
        m.uy[m.index(x, y)] = 0.1 * (y + 0.5) / (n - 0.5) + 0.1 * (x + 0.5) / n;
      }
    }
    const auto p = centerline_profiles(g, m, 0.1);
    CAPTURE(n);
    for (std::size_t k = 0; k < p.vx_vs_y.size(); ++k) {
      CHECK(p.vx_vs_y.value[k] == doctest::Approx(p.vx_vs_y.coord[k]).epsilon(1e-12));
    }
    // interior samples: mid-height 0.5 plus x
    for (std::size_t k = 1; k + 1 < p.vy_vs_x.size(); ++k) {
      CHECK(p.vy_vs_x.value[k] == doctest::Approx(0.5 + p.vy_vs_x.coord[k]).epsilon(1e-12));
    }
    CHECK(p.vy_vs_x.coord.front() == 0.0);
    CHECK(p.vy_vs_x.coord.back() == 1.0);
  }
}

TEST_CASE("parabola fit") {
  Profile p;
  for (int k = 0; k < 512; ++k) {
    const double r = (k + 0.5 - 256.0) / 256.0;
    p.coord.push_back(k);
    p.value.push_back(0.159 * (1 - r * r));
  }
  const auto f = poiseuille_fit(p);
  CHECK(f.parabolic);
  CHECK(f.v_max == doctest::Approx(0.159).epsilon(1e-12));
  CHECK(f.center == doctest::Approx(255.5).epsilon(1e-12));
  CHECK(f.residual < 1e-12);

  for (double vmax : {0.01, 0.05, 0.2}) {
    for (double c : {20.3, 31.7, 40.0}) {
      Profile q;
      for (int y = 0; y <= 64; ++y) {
        q.coord.push_back(y);
        q.value.push_back(vmax * (1 - (y - c) * (y - c) / (40.0 * 40.0)));
      }
      const auto g = poiseuille_fit(q);
      CHECK(std::abs(g.v_max - vmax) < 1e-10);
      CHECK(std::abs(g.center - c) < 1e-10);
    }
  }

  const auto flat = poiseuille_fit({{0, 1, 2, 3, 4, 5}, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1}});
  CHECK_FALSE(flat.parabolic);
  CHECK(flat.residual == 1.0);
  CHECK_THROWS_AS(poiseuille_fit({{0, 1, 2, 3}, {0, 1, 1, 0}}), InvalidArgument);
}

TEST_CASE("total mass") {
  Geometry g = build_cavity(20, 10, 0.0);
  Simulation<double> sim(g, LayoutKind::Tile, FlowParams::from_viscosity(0.0, 9, 0.1));
  sim.initialize(1.0, {0.0, 0.0});
  CHECK(total_mass(sim) == doctest::Approx(200.0).epsilon(1e-14));

  Geometry empty;
  empty.descriptors = NodeDescriptorField(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) empty.descriptors.set(x, y, NodeType::Solid);
  }
  finalize_geometry(empty);
  Simulation<double> none(empty, LayoutKind::PointerTile, FlowParams::from_viscosity(0.0, 9, 0.1));
  none.initialize();
  CHECK(total_mass(none) == 0.0);
}

TEST_CASE("wake classification") {
  const double U = 0.1;
  std::vector<double> flat(20001, 0.003);
  CHECK(wake_classifier(flat, U).regime == WakeRegime::Steady);

  std::vector<double> sine(20001);
  for (std::size_t k = 0; k < sine.size(); ++k) sine[k] = 0.01 * U * std::sin(2 * std::numbers::pi * k / 500.0);
  const auto w = wake_classifier(sine, U);
  CHECK(w.regime == WakeRegime::Oscillatory);
  CHECK(w.peak_to_peak == doctest::Approx(0.02 * U).epsilon(1e-6));
  CHECK(w.period == doctest::Approx(500.0).epsilon(1e-6));

  std::vector<double> shifted = sine;
  for (double& v : shifted) v += 0.37;
  const auto s = wake_classifier(shifted, U);
  CHECK(s.regime == w.regime);
  CHECK(s.period == doctest::Approx(w.period).epsilon(1e-9));
  CHECK(s.peak_to_peak == doctest::Approx(w.peak_to_peak).epsilon(1e-9));

  // sampled every 10 steps: 2001 samples cover 2*10^4 steps
  std::vector<double> coarse(2001);
  for (std::size_t k = 0; k < coarse.size(); ++k) coarse[k] = 0.01 * U * std::sin(2 * std::numbers::pi * k * 10 / 500.0);
  CHECK(wake_classifier(coarse, U, 10.0).period == doctest::Approx(500.0).epsilon(1e-3));

  std::vector<double> tiny(20001);
  for (std::size_t k = 0; k < tiny.size(); ++k) tiny[k] = 4e-4 * U * std::sin(k * 0.01);
  CHECK(wake_classifier(tiny, U).regime == WakeRegime::Steady);

  CHECK_THROWS_AS(wake_classifier(std::vector<double>(15000, 0.0), U), InvalidArgument);
}
