#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wgcav/config.hpp"
#include "wgcav/oracle.hpp"

namespace wgcav {

// exit codes shared with the CLI
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_solver_failure = 2;
inline constexpr int exit_validation_failure = 3;

std::string csv_header();
std::string csv_row(const QedReport& r, const std::string& config_hash);

struct SweepPointResult {
  double R = 0.0;
  double t = 0.0;
  std::optional<QedReport> te, tm;
  std::string error;  // nonempty when this point failed
  double wall_seconds = 0.0;
  int grid_nr = 0, grid_nz = 0;
};

/// Runs the Cartesian product of sweep axes x polarizations; results come
/// back in deterministic (R, t) order regardless of worker completion order.
std::vector<SweepPointResult> execute_sweep(const RunConfig& cfg,
                                            std::ostream* log = nullptr);

std::string sweep_csv(const RunConfig& cfg,
                      const std::vector<SweepPointResult>& rows);
std::string sweep_json(const RunConfig& cfg,
                       const std::vector<SweepPointResult>& rows,
                       bool include_wall_time = true);

/// Plain-text field map at cell centers:
/// rho_m z_m medium Re_Erho Im_Erho Re_Ephi Im_Ephi Re_Ez Im_Ez.
void dump_field_text(const ModeSolution& mode, const Grid& grid,
                     std::ostream& os);

struct ValidationRow {
  int l = 0;
  Polarization polarization = Polarization::QuasiTE;
  double lambda_numeric = 0.0, lambda_analytic = 0.0;
  double q_rad_numeric = 0.0, q_rad_analytic = 0.0;
  double lambda_rel_err = 0.0, log10_q_diff = 0.0;
  bool q_checked = false;
  bool pass = false;
};

std::vector<ValidationRow> execute_validation(const RunConfig& cfg,
                                              std::ostream* log = nullptr);

int run_single(const RunConfig& cfg, std::ostream& log);
int run_sweep(const RunConfig& cfg, std::ostream& log);
int run_validate(const RunConfig& cfg, std::ostream& log);
int run_dump_field(const RunConfig& cfg, std::ostream& log);

} // namespace wgcav
