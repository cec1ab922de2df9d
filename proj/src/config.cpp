#include "lbm2d/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lbm2d/error.hpp"
#include "lbm2d/format.hpp"

namespace lbm2d {

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Bench: return "bench";
    case RunMode::Validate: return "validate";
    case RunMode::Sweep: return "sweep";
  }
  return "?";
}

std::string to_string(CaseKind c) {
  switch (c) {
    case CaseKind::Cavity: return "cavity";
    case CaseKind::ChanV: return "chan_v";
    case CaseKind::ChanP: return "chan_p";
    case CaseKind::CylinderCircle: return "cylinder_circle";
    case CaseKind::CylinderSquare: return "cylinder_square";
    case CaseKind::PorousRegular: return "porous_regular";
    case CaseKind::PorousRandom: return "porous_random";
  }
  return "?";
}

std::string to_string(ColorScale s) { return s == ColorScale::Linear ? "linear" : "log"; }

namespace {

const std::set<std::string> kKnownKeys = {
    "mode",   "case",         "n",           "nx",          "ny",          "Re",         "nu",         "U",
    "layout", "scalar",       "steps",       "save_every",  "phi_target", "seed",       "B_peak",
    "output_dir", "workers",  "isa",         "warmup_steps", "color_scale", "paper_scale",
    "check_every", "sample_every", "porosities", "layouts"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class Reader {
public:
  explicit Reader(const ConfigMap& kv) : kv_(kv) {}

  const std::string* raw(const std::string& key) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
  }

  template <typename N>
  N number(const std::string& key, N fallback) const {
    const std::string* s = raw(key);
    if (!s) return fallback;
    N v{};
    const auto [p, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
    if (ec != std::errc{} || p != s->data() + s->size()) {
      throw ConfigError("'" + key + "': malformed number '" + *s + "'");
    }
    if constexpr (std::is_floating_point_v<N>) {
      if (!std::isfinite(v)) throw ConfigError("'" + key + "': value must be finite");
    }
    return v;
  }

  std::optional<double> optional_double(const std::string& key) const {
    if (!raw(key)) return std::nullopt;
    return number<double>(key, 0.0);
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(*raw(key));
    for (std::string item; std::getline(ss, item, ',');) {
      item = trim(item);
      if (item.empty()) throw ConfigError("'" + key + "': empty list item");
      out.push_back(item);
    }
    if (out.empty()) throw ConfigError("'" + key + "': list is empty");
    return out;
  }

private:
  const ConfigMap& kv_;
};

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("'" + key + "': " + why);
}

bool is_cylinder(CaseKind c) { return c == CaseKind::CylinderCircle || c == CaseKind::CylinderSquare; }
bool is_porous(CaseKind c) { return c == CaseKind::PorousRegular || c == CaseKind::PorousRandom; }

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap kv;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", n);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key", n);
    if (!kv.emplace(key, value).second) throw ParseError("duplicate key '" + key + "'", n);
  }
  return kv;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig parse_config(const ConfigMap& kv) {
  for (const auto& [k, v] : kv) {
    if (!kKnownKeys.count(k)) throw ConfigError("unknown key '" + k + "'");
  }
  std::vector<std::string> missing;
  for (const char* k : {"mode", "case", "steps"}) {
    if (!kv.count(k)) missing.emplace_back(k);
  }
  if (!kv.count("Re") && !kv.count("nu")) missing.emplace_back("Re or nu");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : " ") + missing[i];
    throw ConfigError(msg);
  }
  if (kv.count("Re") && kv.count("nu")) throw ConfigError("give exactly one of 'Re' and 'nu', not both");

  const Reader r(kv);
  RunConfig c;

  const std::string& mode = *r.raw("mode");
  if (mode == "simulate") c.mode = RunMode::Simulate;
  else if (mode == "bench") c.mode = RunMode::Bench;
  else if (mode == "validate") c.mode = RunMode::Validate;
  else if (mode == "sweep") c.mode = RunMode::Sweep;
  else bad("mode", "expected simulate|bench|validate|sweep, got '" + mode + "'");

  const std::string& cs = *r.raw("case");
  bool found = false;
  for (CaseKind k : {CaseKind::Cavity, CaseKind::ChanV, CaseKind::ChanP, CaseKind::CylinderCircle,
                     CaseKind::CylinderSquare, CaseKind::PorousRegular, CaseKind::PorousRandom}) {
    if (to_string(k) == cs) {
      c.case_kind = k;
      found = true;
    }
  }
  if (!found) {
    bad("case", "expected cavity|chan_v|chan_p|cylinder_circle|cylinder_square|porous_regular|"
                "porous_random, got '" + cs + "'");
  }

  if (kv.count("n") && (kv.count("nx") || kv.count("ny"))) bad("n", "give either n or nx/ny");
  c.nx = r.number<int>("nx", r.number<int>("n", 0));
  c.ny = r.number<int>("ny", r.number<int>("n", 0));
  if (kv.count("n") && c.nx < 0) bad("n", "must be >= 0");
  if (c.nx < 0) bad("nx", "must be >= 0");
  if (c.ny < 0) bad("ny", "must be >= 0");
  c.re = r.optional_double("Re");
  c.nu = r.optional_double("nu");
  if (c.re && !(*c.re > 0.0)) bad("Re", "must be positive");
  if (c.nu && !(*c.nu > 0.0)) bad("nu", "must be positive");
  c.U = r.number<double>("U", c.U);
  if (!(c.U >= 0.0 && c.U < 0.5)) bad("U", "must lie in [0, 0.5)");
  if (c.re && c.U == 0.0) bad("U", "must be positive when Re is given");

  if (const std::string* s = r.raw("layout")) {
    const auto l = parse_layout(*s);
    if (!l) bad("layout", "expected dense|tile|bitmask_node|pointer_tile, got '" + *s + "'");
    c.layout = *l;
  }
  if (const std::string* s = r.raw("scalar")) {
    if (*s == "f32") c.f64 = false;
    else if (*s == "f64") c.f64 = true;
    else bad("scalar", "expected f32|f64, got '" + *s + "'");
  }
  c.steps = r.number<std::int64_t>("steps", 0);
  if (c.steps < 1) bad("steps", "must be >= 1");
  c.save_every = r.number<std::int64_t>("save_every", c.save_every);
  if (c.save_every < 0) bad("save_every", "must be >= 0");
  c.phi_target = r.number<double>("phi_target", c.phi_target);
  if (!(c.phi_target >= 0.1 && c.phi_target <= 1.0)) bad("phi_target", "must lie in [0.1, 1]");
  if (c.case_kind == CaseKind::PorousRegular && c.phi_target < 0.3) {
    bad("phi_target", "regular arrays need phi_target >= 0.3");
  }
  c.seed = r.number<std::uint64_t>("seed", c.seed);
  c.b_peak = r.number<double>("B_peak", c.b_peak);
  if (!(c.b_peak >= 0.0)) bad("B_peak", "must be >= 0");
  if (const std::string* s = r.raw("output_dir")) {
    if (s->empty()) bad("output_dir", "must not be empty");
    c.output_dir = *s;
  }
  c.workers = r.number<int>("workers", c.workers);
  if (c.workers < 0) bad("workers", "must be >= 0");
  if (const std::string* s = r.raw("isa")) {
    if (*s != "auto" && *s != "scalar" && *s != "avx2") bad("isa", "expected auto|scalar|avx2");
    c.isa = *s;
  }
  c.warmup_steps = r.number<std::int64_t>("warmup_steps", c.warmup_steps);
  if (c.warmup_steps < 0) bad("warmup_steps", "must be >= 0");
  if (const std::string* s = r.raw("color_scale")) {
    if (*s == "linear") c.color_scale = ColorScale::Linear;
    else if (*s == "log") c.color_scale = ColorScale::Log;
    else bad("color_scale", "expected linear|log");
  }
  if (const std::string* s = r.raw("paper_scale")) {
    if (*s == "true" || *s == "1") c.paper_scale = true;
    else if (*s == "false" || *s == "0") c.paper_scale = false;
    else bad("paper_scale", "expected true|false");
  }
  c.check_every = r.number<std::int64_t>("check_every", c.check_every);
  if (c.check_every < 0) bad("check_every", "must be >= 0");
  c.sample_every = r.number<std::int64_t>("sample_every", c.sample_every);
  if (c.sample_every < 1) bad("sample_every", "must be >= 1");
  if (r.raw("porosities")) {
    c.porosities.clear();
    for (const std::string& item : r.list("porosities")) {
      double v = 0;
      const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || p != item.data() + item.size() || !(v >= 0.1 && v <= 1.0)) {
        bad("porosities", "items must be numbers in [0.1, 1], got '" + item + "'");
      }
      c.porosities.push_back(v);
    }
  }
  if (r.raw("layouts")) {
    c.sweep_layouts.clear();
    for (const std::string& item : r.list("layouts")) {
      const auto l = parse_layout(item);
      if (!l) bad("layouts", "unknown layout '" + item + "'");
      c.sweep_layouts.push_back(*l);
    }
  }

  if (is_porous(c.case_kind) && c.nx != 0 && c.ny != 0 && c.nx != c.ny) {
    bad("ny", "porous domains are square");
  }
  const int nx = resolved_nx(c);
  const int ny = resolved_ny(c);
  if (nx < 8 || ny < 8) bad(c.nx < 8 && c.nx != 0 ? "nx" : "ny", "domain must be at least 8 x 8");
  if (is_cylinder(c.case_kind) && nx < 4 * ny) bad("nx", "cylinder cases need nx >= 4 ny");
  if (static_cast<std::int64_t>(nx) * ny > kDeskScaleNodes && !c.paper_scale) {
    bad("nx", "domains above 1024^2 nodes need paper_scale = true");
  }
  return c;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file, const ConfigMap& overrides) {
  ConfigMap kv = file ? read_config_file(*file) : ConfigMap{};
  for (const auto& [k, v] : overrides) {
    // an explicit Re on the command line replaces a file nu and vice versa
    if (k == "Re") kv.erase("nu");
    if (k == "nu") kv.erase("Re");
    if (k == "n") {
      kv.erase("nx");
      kv.erase("ny");
    }
    if ((k == "nx" || k == "ny") && kv.count("n")) {
      kv.emplace("nx", kv["n"]);
      kv.emplace("ny", kv["n"]);
      kv.erase("n");
    }
    kv[k] = v;
  }
  return parse_config(kv);
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "mode = " << to_string(c.mode) << '\n';
  o << "case = " << to_string(c.case_kind) << '\n';
  o << "nx = " << c.nx << '\n';
  o << "ny = " << c.ny << '\n';
  if (c.re) o << "Re = " << format_double(*c.re) << '\n';
  if (c.nu) o << "nu = " << format_double(*c.nu) << '\n';
  o << "U = " << format_double(c.U) << '\n';
  o << "layout = " << to_string(c.layout) << '\n';
  o << "scalar = " << (c.f64 ? "f64" : "f32") << '\n';
  o << "steps = " << c.steps << '\n';
  o << "save_every = " << c.save_every << '\n';
  o << "phi_target = " << format_double(c.phi_target) << '\n';
  o << "seed = " << c.seed << '\n';
  o << "B_peak = " << format_double(c.b_peak) << '\n';
  o << "output_dir = " << c.output_dir << '\n';
  o << "workers = " << c.workers << '\n';
  o << "isa = " << c.isa << '\n';
  o << "warmup_steps = " << c.warmup_steps << '\n';
  o << "color_scale = " << to_string(c.color_scale) << '\n';
  o << "paper_scale = " << (c.paper_scale ? "true" : "false") << '\n';
  o << "check_every = " << c.check_every << '\n';
  o << "sample_every = " << c.sample_every << '\n';
  o << "porosities = ";
  for (std::size_t i = 0; i < c.porosities.size(); ++i) o << (i ? "," : "") << format_double(c.porosities[i]);
  o << '\n';
  o << "layouts = ";
  for (std::size_t i = 0; i < c.sweep_layouts.size(); ++i) o << (i ? "," : "") << to_string(c.sweep_layouts[i]);
  o << '\n';
  return o.str();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_config_text(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int resolved_nx(const RunConfig& c) {
  if (c.nx != 0) return c.nx;
  switch (c.case_kind) {
    case CaseKind::Cavity: return 128;
    case CaseKind::PorousRegular:
    case CaseKind::PorousRandom: return c.ny != 0 ? c.ny : 1024;
    default: return 1024;
  }
}

int resolved_ny(const RunConfig& c) {
  if (c.ny != 0) return c.ny;
  switch (c.case_kind) {
    case CaseKind::Cavity: return c.nx != 0 ? c.nx : 128;
    case CaseKind::PorousRegular:
    case CaseKind::PorousRandom: return resolved_nx(c);
    default: return 128;
  }
}

double characteristic_length(const RunConfig& c) {
  const int ny = resolved_ny(c);
  switch (c.case_kind) {
    case CaseKind::Cavity: return ny - 1;
    case CaseKind::ChanV:
    case CaseKind::ChanP: return ny;
    case CaseKind::CylinderCircle:
    case CaseKind::CylinderSquare: return cylinder_layout(resolved_nx(c), ny).diameter;
    case CaseKind::PorousRegular:
    case CaseKind::PorousRandom: return resolved_nx(c);
  }
  return 1.0;
}

FlowParams flow_params(const RunConfig& c) {
  const double L = characteristic_length(c);
  if (c.re) return FlowParams::from_reynolds(c.U, L, *c.re);
  if (c.nu) return FlowParams::from_viscosity(c.U, L, *c.nu);
  throw ConfigError("missing required keys: Re or nu");
}

CylinderLayout cylinder_layout(int nx, int ny) {
  CylinderLayout l;
  l.diameter = 0.5 * ny;
  l.center = {2.0 * ny, 0.5 * ny};
  l.probe_x = static_cast<int>(std::lround(l.center.x + 1.5 * l.diameter));
  l.probe_y = ny / 2;
  if (l.probe_x >= nx - 1) throw InvalidArgument("wake probe falls outside the channel");
  return l;
}

Geometry build_case_geometry(const RunConfig& c) {
  const int nx = resolved_nx(c);
  const int ny = resolved_ny(c);
  switch (c.case_kind) {
    case CaseKind::Cavity: return build_cavity(nx, ny, c.U);
    case CaseKind::ChanV: return build_channel(nx, ny, VelocityInlet{{c.U, 0.0}});
    case CaseKind::ChanP: return build_channel(nx, ny, PressureInlet{});
    case CaseKind::CylinderCircle:
    case CaseKind::CylinderSquare: {
      Geometry g = build_channel(nx, ny, VelocityInlet{{c.U, 0.0}});
      const CylinderLayout l = cylinder_layout(nx, ny);
      add_cylinder(g,
                   c.case_kind == CaseKind::CylinderCircle ? ObstacleShape::Circle : ObstacleShape::Square,
                   l.diameter, l.center);
      g.case_name = to_string(c.case_kind);
      g.characteristic_length = l.diameter;
      return g;
    }
    case CaseKind::PorousRegular: return build_porous_regular(nx, c.phi_target);
    case CaseKind::PorousRandom: return build_porous_random(nx, c.phi_target, c.seed);
  }
  throw ConfigError("unknown case");
}

}  // namespace lbm2d
