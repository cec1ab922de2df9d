#include "lbm2d/validation.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lbm2d/error.hpp"

namespace lbm2d {

double interpolate(const Profile& p, double at) {
  if (p.coord.empty()) throw InvalidArgument("empty profile");
  if (at <= p.coord.front()) return p.value.front();
  if (at >= p.coord.back()) return p.value.back();
  const auto it = std::upper_bound(p.coord.begin(), p.coord.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - p.coord.begin());
  const double x0 = p.coord[k - 1];
  const double x1 = p.coord[k];
  const double s = (at - x0) / (x1 - x0);
  return p.value[k - 1] + s * (p.value[k] - p.value[k - 1]);
}

// ---- reference table ----

namespace {

void check_block(const Profile& p, int re, char which, int line) {
  if (p.size() < 2) {
    throw ParseError("block re " + std::to_string(re) + " " + which + " has fewer than 2 rows", line);
  }
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (!(p.coord[k] > p.coord[k - 1])) {
      throw ParseError("coordinates not strictly ascending in block re " + std::to_string(re) + " " + which, line);
    }
  }
  if (which == 'u' && (p.coord.back() != 1.0 || p.value.back() != 1.0)) {
    throw ParseError("u block for re " + std::to_string(re) + " must end with the lid sample (1, 1)", line);
  }
}

}  // namespace

GhiaReferenceTable GhiaReferenceTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open reference table " + path.string());
  GhiaReferenceTable t;
  std::string raw;
  int line = 0;
  int re = 0;
  char which = 0;
  Profile* cur = nullptr;
  int block_line = 0;
  auto close = [&] {
    if (cur) check_block(*cur, re, which, block_line);
    cur = nullptr;
  };
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::istringstream ls(raw);
    std::string a;
    if (!(ls >> a)) continue;
    if (a == "re") {
      close();
      std::string w;
      if (!(ls >> re >> w) || (w != "u" && w != "v") || re <= 0) {
        throw ParseError("expected 're <Re> u|v'", line);
      }
      which = w[0];
      GhiaProfiles& g = t.table_[re];
      cur = which == 'u' ? &g.vx_vs_y : &g.vy_vs_x;
      if (cur->size() != 0) throw ParseError("duplicate block re " + std::to_string(re) + " " + w, line);
      block_line = line;
      continue;
    }
    if (!cur) throw ParseError("data row before any 're' header", line);
    double c = 0;
    double v = 0;
    std::string extra;
    try {
      std::size_t used = 0;
      c = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
    } catch (const std::exception&) {
      throw ParseError("bad coordinate '" + a + "'", line);
    }
    if (!(ls >> v) || (ls >> extra)) throw ParseError("expected exactly two columns", line);
    cur->coord.push_back(c);
    cur->value.push_back(v);
  }
  close();
  for (const auto& [r, g] : t.table_) {
    if (g.vx_vs_y.size() == 0 || g.vy_vs_x.size() == 0) {
      throw ParseError("re " + std::to_string(r) + " lacks a u or v block", line);
    }
  }
  return t;
}

const GhiaReferenceTable& GhiaReferenceTable::builtin() {
  static const GhiaReferenceTable table = [] {
    std::filesystem::path dir = LBM2D_DATA_DIR;
    if (const char* env = std::getenv("LBM2D_DATA_DIR")) dir = env;
    return load(dir / "ghia1982.dat");
  }();
  return table;
}

const GhiaProfiles& GhiaReferenceTable::at(int re) const {
  const auto it = table_.find(re);
  if (it == table_.end()) {
    throw InvalidArgument("no reference data for Re = " + std::to_string(re));
  }
  return it->second;
}

std::vector<int> GhiaReferenceTable::reynolds_numbers() const {
  std::vector<int> out;
  for (const auto& [re, g] : table_) out.push_back(re);
  return out;
}

std::vector<std::size_t> find_outliers(const Profile& p, double threshold) {
  // worst point first, then re-check without it
  std::vector<std::size_t> keep(p.size());
  for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = k;
  std::vector<std::size_t> out;
  while (keep.size() >= 3) {
    double worst = threshold;
    std::size_t at = 0;
    for (std::size_t j = 1; j + 1 < keep.size(); ++j) {
      const std::size_t a = keep[j - 1], k = keep[j], b = keep[j + 1];
      const double s = (p.coord[k] - p.coord[a]) / (p.coord[b] - p.coord[a]);
      const double e = std::abs(p.value[k] - (p.value[a] + s * (p.value[b] - p.value[a])));
      if (e > worst) {
        worst = e;
        at = j;
      }
    }
    if (at == 0) break;
    out.push_back(keep[at]);
    keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(at));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- profiles ----

GhiaProfiles centerline_profiles(const Geometry& g, const MacroFields& m, double U) {
  if (g.case_name != "cavity") {
    throw InvalidArgument("centreline profiles need a cavity case, got '" + g.case_name + "'");
  }
  if (m.nx != g.nx() || m.ny != g.ny()) throw InvalidArgument("field size does not match geometry");
  const int nx = g.nx();
  const int ny = g.ny();
  const double scale = U != 0.0 ? 1.0 / U : 1.0;
  // Bounce-back walls sit half a link outside the border nodes; the lid row is
  // the wall itself. So x spans [-0.5, nx-0.5] and y spans [-0.5, ny-1].
  const double width = nx;
  const double height = ny - 0.5;
  GhiaProfiles p;
  // x = (nx-1)/2 falls between two columns for even nx
  const int xa = (nx - 1) / 2;
  const int xb = nx / 2;
  p.vx_vs_y.coord.push_back(0.0);
  p.vx_vs_y.value.push_back(0.0);
  for (int y = 0; y < ny; ++y) {
    p.vx_vs_y.coord.push_back((y + 0.5) / height);
    p.vx_vs_y.value.push_back(0.5 * (m.ux[m.index(xa, y)] + m.ux[m.index(xb, y)]) * scale);
  }
  // mid-height y = (ny-1.5)/2, between rows ya and ya+1
  const double yc = 0.5 * (ny - 1.5);
  const int ya = static_cast<int>(std::floor(yc));
  const double t = yc - ya;
  p.vy_vs_x.coord.push_back(0.0);
  p.vy_vs_x.value.push_back(0.0);
  for (int x = 0; x < nx; ++x) {
    p.vy_vs_x.coord.push_back((x + 0.5) / width);
    p.vy_vs_x.value.push_back(((1 - t) * m.uy[m.index(x, ya)] + t * m.uy[m.index(x, ya + 1)]) * scale);
  }
  p.vy_vs_x.coord.push_back(1.0);
  p.vy_vs_x.value.push_back(0.0);
  return p;
}

ProfileComparison compare_to_ghia(const GhiaProfiles& sim, int re, const GhiaReferenceTable& table,
                                  bool exclude_outliers) {
  const GhiaProfiles& ref = table.at(re);
  ProfileComparison c;
  double sq = 0.0;
  auto accumulate = [&](const Profile& s, const Profile& r, const char* name) {
    std::vector<std::size_t> skip;
    if (exclude_outliers) skip = find_outliers(r);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (std::find(skip.begin(), skip.end(), k) != skip.end()) {
        ++c.excluded;
        continue;
      }
      const double e = std::abs(interpolate(s, r.coord[k]) - r.value[k]);
      sq += e * e;
      ++c.n;
      c.max_abs_err = std::max(c.max_abs_err, e);
      if (r.value[k] != 0.0) {
        const double rel = e / std::abs(r.value[k]);
        if (rel > c.max_rel_err || c.max_rel_profile.empty()) {
          c.max_rel_err = rel;
          c.max_rel_profile = name;
          c.max_rel_coord = r.coord[k];
        }
      }
    }
  };
  accumulate(sim.vx_vs_y, ref.vx_vs_y, "vx");
  accumulate(sim.vy_vs_x, ref.vy_vs_x, "vy");
  c.mse = c.n ? sq / static_cast<double>(c.n) : 0.0;
  return c;
}

Profile cross_profile(const Geometry& g, const MacroFields& m, int x) {
  if (x < 0 || x >= g.nx()) throw InvalidArgument("column outside the domain");
  Profile p;
  for (int y = 0; y < g.ny(); ++y) {
    if (g.descriptors.type(x, y) == NodeType::Solid) continue;
    p.coord.push_back(y);
    p.value.push_back(m.ux[m.index(x, y)]);
  }
  return p;
}

PoiseuilleFit poiseuille_fit(const Profile& p) {
  const std::size_t n = p.size();
  if (n < 5) throw InvalidArgument("profile needs at least 5 samples");
  // centred and scaled abscissa keeps the normal equations well conditioned
  const double mean_y = std::accumulate(p.coord.begin(), p.coord.end(), 0.0) / n;
  double half = 0.0;
  for (double y : p.coord) half = std::max(half, std::abs(y - mean_y));
  if (half == 0.0) throw InvalidArgument("profile coordinates are all equal");
  double s[5] = {};
  double r[3] = {};
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (p.coord[k] - mean_y) / half;
    double tp = 1.0;
    for (int j = 0; j < 5; ++j) {
      if (j < 3) r[j] += tp * p.value[k];
      s[j] += tp;
      tp *= t;
    }
  }
  std::array<std::array<double, 4>, 3> a{{{s[0], s[1], s[2], r[0]},
                                          {s[1], s[2], s[3], r[1]},
                                          {s[2], s[3], s[4], r[2]}}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    }
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0) throw InvalidArgument("degenerate profile");
    for (int row = 0; row < 3; ++row) {
      if (row == col) continue;
      const double f = a[row][col] / a[col][col];
      for (int j = col; j < 4; ++j) a[row][j] -= f * a[col][j];
    }
  }
  const double c0 = a[0][3] / a[0][0];
  const double c1 = a[1][3] / a[1][1];
  const double c2 = a[2][3] / a[2][2];

  double mean_v = std::accumulate(p.value.begin(), p.value.end(), 0.0) / n;
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (p.coord[k] - mean_y) / half;
    const double fit = c0 + t * (c1 + t * c2);
    ss_res += (p.value[k] - fit) * (p.value[k] - fit);
    ss_tot += (p.value[k] - mean_v) * (p.value[k] - mean_v);
  }
  PoiseuilleFit out;
  if (!(c2 < 0.0) || ss_tot == 0.0) {
    out.v_max = *std::max_element(p.value.begin(), p.value.end());
    out.center = mean_y;
    out.residual = 1.0;
    out.parabolic = false;
    return out;
  }
  const double t_peak = -c1 / (2.0 * c2);
  out.center = mean_y + t_peak * half;
  out.v_max = c0 - c1 * c1 / (4.0 * c2);
  out.residual = ss_res / ss_tot;
  out.parabolic = out.v_max > 0.0;
  return out;
}

WakeClassification wake_classifier(std::span<const double> series, double U, double sample_every,
                                   double transient_fraction) {
  if (!(sample_every > 0.0)) throw InvalidArgument("sample interval must be positive");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0)) {
    throw InvalidArgument("transient fraction must lie in [0, 1)");
  }
  if (!(U > 0.0)) throw InvalidArgument("reference velocity must be positive");
  const auto cut = static_cast<std::size_t>(std::floor(transient_fraction * series.size()));
  const std::span<const double> tail = series.subspan(cut);
  if (tail.size() < 2 || static_cast<double>(tail.size() - 1) * sample_every < kMinWakeCoverageSteps) {
    throw InvalidArgument("series must cover at least 10^4 steps after the transient cut");
  }
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  WakeClassification w;
  w.peak_to_peak = *hi - *lo;
  if (w.peak_to_peak < 1e-3 * U) {
    w.regime = WakeRegime::Steady;
    return w;
  }
  w.regime = WakeRegime::Oscillatory;
  const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / tail.size();
  std::vector<double> ups;
  for (std::size_t k = 1; k < tail.size(); ++k) {
    const double a = tail[k - 1] - mean;
    const double b = tail[k] - mean;
    if (a < 0.0 && b >= 0.0) ups.push_back(static_cast<double>(k - 1) + a / (a - b));
  }
  if (ups.size() >= 2) {
    w.period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1) * sample_every;
  }
  return w;
}

std::string to_string(WakeRegime r) {
  return r == WakeRegime::Steady ? "steady" : "oscillatory";
}

}  // namespace lbm2d
