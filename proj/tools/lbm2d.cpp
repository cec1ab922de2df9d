// lbm2d: run a configured case. Every config key is also a --flag; flags win
// over the config file.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lbm2d/config.hpp"
#include "lbm2d/error.hpp"
#include "lbm2d/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"2D D2Q9 lattice-Boltzmann solver"};
  std::string config_file;
  app.add_option("-c,--config", config_file, "flat key = value config file");

  struct Flag {
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"mode", "simulate | bench | validate | sweep"},
      {"case", "cavity | chan_v | chan_p | cylinder_circle | cylinder_square | porous_regular | porous_random"},
      {"n", "square domain size; sets nx and ny"},
      {"nx", "domain width (0: case default)"},
      {"ny", "domain height (0: case default)"},
      {"Re", "Reynolds number (exclusive with nu)"},
      {"nu", "lattice viscosity (exclusive with Re)"},
      {"U", "characteristic / inlet / lid velocity"},
      {"layout", "dense | tile | bitmask_node | pointer_tile"},
      {"scalar", "f32 | f64"},
      {"steps", "time steps (bench, sweep: timed steps)"},
      {"save_every", "snapshot interval; 0 writes only the final state"},
      {"phi_target", "porosity for porous cases"},
      {"seed", "random placement seed"},
      {"B_peak", "peak memory bandwidth, bytes/s"},
      {"output_dir", "artifact directory"},
      {"workers", "OpenMP threads; 0 uses all cores"},
      {"isa", "auto | scalar | avx2"},
      {"warmup_steps", "untimed steps before a benchmark"},
      {"color_scale", "linear | log"},
      {"paper_scale", "true to allow domains above 1024^2"},
      {"check_every", "divergence scan interval; 0 disables"},
      {"sample_every", "cylinder probe interval"},
      {"porosities", "sweep porosities, comma separated"},
      {"layouts", "sweep layouts, comma separated"},
  };
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const Flag& f : flags) {
    options[f.key] = app.add_option(std::string("--") + f.key, values[f.key], f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : lbm2d::kExitConfigError;
  }

  lbm2d::ConfigMap overrides;
  for (const auto& [key, opt] : options) {
    if (opt->count() > 0) overrides[key] = values[key];
  }
  try {
    const std::optional<std::filesystem::path> file =
        config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_file);
    const lbm2d::RunConfig cfg = lbm2d::parse_config(file, overrides);
    return lbm2d::execute(cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return lbm2d::kExitConfigError;
  }
}
