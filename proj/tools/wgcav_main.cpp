#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wgcav/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  double resolution_scale = 1.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run-config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--workers", args.workers,
                  "max concurrent solves (overrides config)");
  cmd->add_option("--resolution-scale", args.resolution_scale,
                  "uniform grid refinement multiplier");
}

wgcav::RunConfig load(const CommonArgs& args) {
  wgcav::RunConfig cfg = wgcav::load_config_file(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.workers > 0) cfg.max_workers = args.workers;
  if (args.resolution_scale != 1.0) {
    if (args.resolution_scale <= 0.0)
      throw wgcav::ConfigError("--resolution-scale must be positive");
    cfg.resolution.base_cells_per_wavelength = static_cast<int>(
        std::ceil(cfg.resolution.base_cells_per_wavelength * args.resolution_scale));
    cfg.resolution.min_cells_across_coating = static_cast<int>(
        std::ceil(cfg.resolution.min_cells_across_coating * args.resolution_scale));
  }
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"whispering-gallery cavity QED solver"};
  app.require_subcommand(1);

  CommonArgs solve_args, sweep_args, validate_args, dump_args;
  CLI::App* solve = app.add_subcommand("solve", "single-geometry report");
  add_common(solve, solve_args);
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over t and/or R");
  add_common(sweep, sweep_args);
  CLI::App* validate =
      app.add_subcommand("validate", "numeric vs analytic sphere comparison");
  add_common(validate, validate_args);
  CLI::App* dump = app.add_subcommand("dump-field", "write field maps and grid");
  add_common(dump, dump_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return wgcav::run_single(load(solve_args), std::cerr);
    if (sweep->parsed()) return wgcav::run_sweep(load(sweep_args), std::cerr);
    if (validate->parsed())
      return wgcav::run_validate(load(validate_args), std::cerr);
    if (dump->parsed()) return wgcav::run_dump_field(load(dump_args), std::cerr);
  } catch (const wgcav::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return wgcav::exit_config_error;
  } catch (const wgcav::SolverError& e) {
    std::cerr << e.what() << "\n";
    return wgcav::exit_solver_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wgcav::exit_solver_failure;
  }
  return wgcav::exit_config_error;
}
