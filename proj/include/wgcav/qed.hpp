#pragma once

#include <optional>
#include <string>

#include "wgcav/eigensolver.hpp"

namespace wgcav {

/// Loss budget 1/Q_total = 1/Q_rad + 1/Q_abs (surface-scattering and water
/// terms fixed at infinity). Values above sentinel_threshold are reported as
/// ">= 1e12" (beyond double-precision eigenvalue fidelity).
struct QualityBudget {
  double q_total = 0.0;
  double q_rad = 0.0;   // +inf when the lossless solve is below the numerical floor
  double q_abs = 0.0;   // +inf when absorption is unresolvable

  static constexpr double sentinel_threshold = 1e12;
  static double reported(double q) {
    return q > sentinel_threshold ? sentinel_threshold : q;
  }
  static bool is_sentinel(double q) { return q > sentinel_threshold; }
};

/// NV-center dipole parameters. epsilon_nv has no default: the config must
/// supply it.
struct DipoleParams {
  double mu = 2.74e-29;               // C m
  double gamma_vac_over_2pi = 13e6;   // Hz
  double lambda0 = 637e-9;            // m
  double epsilon_nv = 0.0;            // relative permittivity of diamond
};

struct QedReport {
  // geometry echo
  std::string geometry_variant;
  double R = 0.0, R_minor = 0.0, t = 0.0;

  int m = 0;
  Polarization polarization = Polarization::QuasiTE;
  double lambda_res = 0.0;
  QualityBudget budget;
  double v_m = 0.0;             // m^3
  double gamma_coating = 0.0;   // energy fraction in the coating
  double f = 0.0;               // interface field factor
  double g_max_over_2pi = 0.0;  // Hz
  double g_eff_over_2pi = 0.0;  // Hz
  double kappa_over_2pi = 0.0;  // Hz
  double gamma_eff_over_2pi = 0.0;  // Hz
  double g_over_kappa = 0.0;
  double cooperativity = 0.0;   // g_eff^2 / (kappa gamma_eff)
  double eps_at_max = 1.0;      // relative permittivity at the field maximum
  bool strong_coupling = false;
  bool uncoated = false;
  double solver_residual = 0.0;
};

/// Q budget from the lossless/lossy pair of solves of the same mode.
QualityBudget q_budget(const ModeSolution& lossy_mode,
                       const ModeSolution& lossless_mode);

/// V_m = int n^2 |E|^2 dV / max(n^2 |E|^2), axisymmetric quadrature over the
/// physical window (PML excluded). Errors if the mode leaks into the PML.
double mode_volume(const ModeSolution& mode, const Grid& grid);

/// Fraction of n^2 |E|^2 energy inside one medium region.
double energy_fraction(const ModeSolution& mode, const Grid& grid, MediumId region);

/// f = |E| at the equatorial outer-core interface (coating side) over max |E|;
/// |E| is the unweighted three-component magnitude.
double interface_factor(const ModeSolution& mode, const Grid& grid,
                        const CrossSection& cs);

struct CouplingRates {
  double g_max_over_2pi = 0.0;
  double g_eff_over_2pi = 0.0;
};

/// g_max = mu sqrt(omega_c / (2 hbar eps0 eps_r_at_max V_m)), g_eff = f g_max.
/// eps_r_at_max is the relative permittivity at the field-maximum location;
/// with the V_m of the n^2-weighted normalization this makes
/// g_eff = mu E_vac(r_NV) / hbar independent of where the maximum sits.
CouplingRates coupling(double v_m, double f, double lambda_res,
                       const DipoleParams& dipole, double eps_r_at_max = 1.0);

/// kappa / 2 pi = c / (lambda Q); 0 when Q carries the lossless sentinel.
double cavity_decay(double lambda_res, double q_total);

/// gamma = 9 eps^{5/2} / (2 eps + eps_NV)^2 gamma_vac.
double dielectric_gamma(double eps_medium, const DipoleParams& dipole);

/// Default surrounding-medium permittivity: mean of core and coating.
double default_embedding_eps(const CrossSection& cs);

/// Full figure-of-merit record for one (geometry, polarization) mode pair.
QedReport build_report(const CrossSection& cs, int m, const ModeSolution& lossless,
                       const ModeSolution& lossy, const Grid& grid,
                       const DipoleParams& dipole,
                       std::optional<double> eps_embedding = std::nullopt);

} // namespace wgcav
