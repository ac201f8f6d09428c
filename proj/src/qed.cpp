#include "wgcav/qed.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double two_pi = 2.0 * constants::pi;

double cell_volume(const Grid& g, int i, int j) {
  return two_pi * g.rho_centers[i] * g.drho(i) * g.dz(j);
}

} // namespace

QualityBudget q_budget(const ModeSolution& lossy_mode,
                       const ModeSolution& lossless_mode) {
  if (lossy_mode.m != lossless_mode.m ||
      lossy_mode.polarization != lossless_mode.polarization)
    throw std::invalid_argument(
        "q_budget: lossy and lossless solves are different modes");
  QualityBudget b;
  b.q_rad = quality_factor(lossless_mode.omega);
  b.q_total = quality_factor(lossy_mode.omega);
  const double linewidth = lossy_mode.lambda_res /
                           std::min(b.q_total, QualityBudget::sentinel_threshold);
  if (std::abs(lossy_mode.lambda_res - lossless_mode.lambda_res) >
      1e3 * linewidth)
    throw std::invalid_argument(
        "q_budget: lossy and lossless resonances are further apart than 1e3 "
        "linewidths");
  if (b.q_total >= b.q_rad) {
    b.q_abs = inf;  // numerical noise: absorption unresolvable
  } else {
    b.q_abs = 1.0 / (1.0 / b.q_total - 1.0 / b.q_rad);
  }
  return b;
}

double mode_volume(const ModeSolution& mode, const Grid& grid) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  double integral = 0.0;
  double w_max = 0.0;
  double edge_peak = 0.0;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      if (grid.cell_in_pml(i, j)) continue;
      const double w = mode.cell_weighted_intensity[grid.cell_index(i, j)];
      integral += w * cell_volume(grid, i, j);
      w_max = std::max(w_max, w);
      const bool adjacent_to_pml = i + 1 == nr - grid.pml_cells_rho ||
                                   j == grid.pml_cells_z_lo ||
                                   j + 1 == nz - grid.pml_cells_z_hi;
      if (adjacent_to_pml) edge_peak = std::max(edge_peak, w);
    }
  if (w_max <= 0.0) throw std::invalid_argument("mode_volume: empty mode fields");
  if (edge_peak > 1e-3 * w_max)
    throw std::runtime_error(
        "mode_volume: integration window clipped by the PML (mode not contained)");
  return integral / w_max;
}

double energy_fraction(const ModeSolution& mode, const Grid& grid,
                       MediumId region) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  double num = 0.0, den = 0.0;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      if (grid.cell_in_pml(i, j)) continue;
      const size_t c = grid.cell_index(i, j);
      const double e = mode.cell_weighted_intensity[c] * cell_volume(grid, i, j);
      den += e;
      if (grid.cell_medium[c] == region) num += e;
    }
  return den > 0.0 ? num / den : 0.0;
}

double interface_factor(const ModeSolution& mode, const Grid& grid,
                        const CrossSection& cs) {
  const Point p = cs.interface_point();
  const int nr = grid.n_rho(), nz = grid.n_z();

  // first cell column whose center lies outside the core rim
  int i_s = -1;
  for (int i = 0; i < nr; ++i)
    if (grid.rho_centers[i] > p.rho) {
      i_s = i;
      break;
    }
  if (i_s < 0 || i_s >= nr - grid.pml_cells_rho)
    throw std::runtime_error("interface_factor: evaluation point outside grid");

  // z = 0 node index (the grid snaps an edge there)
  int j0 = -1;
  double best = 1e300;
  for (int j = 0; j <= nz; ++j)
    if (std::abs(grid.z_edges[j]) < best) {
      best = std::abs(grid.z_edges[j]);
      j0 = j;
    }
  if (j0 <= 0 || j0 >= nz)
    throw std::runtime_error("interface_factor: no equatorial node line");

  auto erho_at = [&](int i, int j) { return mode.e_rho[i + static_cast<Eigen::Index>(j) * nr]; };
  auto ephi_at = [&](int i, int j) { return mode.e_phi[i + static_cast<Eigen::Index>(j) * (nr + 1)]; };
  auto ez_at = [&](int i, int j) { return mode.e_z[i + static_cast<Eigen::Index>(j) * (nr + 1)]; };

  const std::complex<double> er = erho_at(i_s, j0);
  const std::complex<double> ep = 0.5 * (ephi_at(i_s, j0) + ephi_at(i_s + 1, j0));
  const std::complex<double> ez =
      0.25 * (ez_at(i_s, j0 - 1) + ez_at(i_s + 1, j0 - 1) + ez_at(i_s, j0) +
              ez_at(i_s + 1, j0));
  const double e_here =
      std::sqrt(std::norm(er) + std::norm(ep) + std::norm(ez));

  double i_max = 0.0;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      if (grid.cell_in_pml(i, j)) continue;
      i_max = std::max(i_max, mode.cell_intensity[grid.cell_index(i, j)]);
    }
  if (i_max <= 0.0) throw std::invalid_argument("interface_factor: empty fields");
  return e_here / std::sqrt(i_max);
}

CouplingRates coupling(double v_m, double f, double lambda_res,
                       const DipoleParams& dipole, double eps_r_at_max) {
  if (v_m <= 0.0) throw std::invalid_argument("coupling: V_m must be positive");
  if (f < 0.0 || f > 1.0 + 1e-9)
    throw std::invalid_argument("coupling: f must lie in [0, 1]");
  if (eps_r_at_max < 1.0)
    throw std::invalid_argument("coupling: eps_r_at_max must be >= 1");
  const double omega_c = two_pi * constants::speed_of_light / lambda_res;
  const double g_max =
      dipole.mu * std::sqrt(omega_c / (2.0 * constants::hbar *
                                       constants::vacuum_permittivity *
                                       eps_r_at_max * v_m));
  CouplingRates out;
  out.g_max_over_2pi = g_max / two_pi;
  out.g_eff_over_2pi = f * out.g_max_over_2pi;
  return out;
}

double cavity_decay(double lambda_res, double q_total) {
  if (!(q_total > 0.0)) throw std::invalid_argument("cavity_decay: Q must be positive");
  if (std::isinf(q_total)) return 0.0;
  return constants::speed_of_light / (lambda_res * q_total);
}

double dielectric_gamma(double eps_medium, const DipoleParams& dipole) {
  if (eps_medium < 1.0)
    throw std::invalid_argument("dielectric_gamma: eps_medium must be >= 1");
  if (dipole.epsilon_nv <= 0.0)
    throw std::invalid_argument("dielectric_gamma: epsilon_nv not configured");
  const double num = 9.0 * std::pow(eps_medium, 2.5);
  const double den = std::pow(2.0 * eps_medium + dipole.epsilon_nv, 2);
  return num / den * dipole.gamma_vac_over_2pi;
}

double default_embedding_eps(const CrossSection& cs) {
  const double n1 = cs.medium(MediumId::Core).n;
  const double n2 = cs.medium(MediumId::Coating).n;
  return 0.5 * (n1 * n1 + n2 * n2);
}

QedReport build_report(const CrossSection& cs, int m, const ModeSolution& lossless,
                       const ModeSolution& lossy, const Grid& grid,
                       const DipoleParams& dipole,
                       std::optional<double> eps_embedding) {
  QedReport r;
  if (const auto* tor = std::get_if<CoatedToroid>(&cs.shape())) {
    r.geometry_variant = "coated_toroid";
    r.R = tor->major_radius;
    r.R_minor = tor->minor_radius;
    r.t = tor->thickness;
  } else if (const auto* sph = std::get_if<CoatedSphere>(&cs.shape())) {
    r.geometry_variant = "coated_sphere";
    r.R = sph->core_radius;
    r.t = sph->thickness;
  } else {
    r.geometry_variant = "cylinder";
    r.R = std::get<Cylinder>(cs.shape()).radius;
  }
  r.uncoated = cs.thickness() == 0.0;

  r.m = m;
  r.polarization = lossy.polarization;
  r.lambda_res = lossy.lambda_res;
  r.budget = q_budget(lossy, lossless);
  r.v_m = mode_volume(lossy, grid);
  r.gamma_coating = energy_fraction(lossy, grid, MediumId::Coating);
  r.f = std::min(interface_factor(lossy, grid, cs), 1.0);
  {
    const int pi_ = grid.rho_cell_at(lossy.peak_rho);
    const int pj_ = grid.z_cell_at(lossy.peak_z);
    const double n_pk = cs.medium(grid.medium_of_cell(pi_, pj_)).n;
    r.eps_at_max = n_pk * n_pk;
  }
  const CouplingRates g = coupling(r.v_m, r.f, r.lambda_res, dipole, r.eps_at_max);
  r.g_max_over_2pi = g.g_max_over_2pi;
  r.g_eff_over_2pi = g.g_eff_over_2pi;
  r.kappa_over_2pi = cavity_decay(r.lambda_res, r.budget.q_total);
  r.gamma_eff_over_2pi =
      dielectric_gamma(eps_embedding.value_or(default_embedding_eps(cs)), dipole);
  r.g_over_kappa =
      r.kappa_over_2pi > 0.0 ? r.g_eff_over_2pi / r.kappa_over_2pi : inf;
  const double kg = r.kappa_over_2pi * r.gamma_eff_over_2pi;
  r.cooperativity = kg > 0.0 ? r.g_eff_over_2pi * r.g_eff_over_2pi / kg : inf;
  r.strong_coupling = r.g_eff_over_2pi >
                      10.0 * std::max(r.kappa_over_2pi, r.gamma_eff_over_2pi);
  r.solver_residual = std::max(lossless.residual, lossy.residual);
  return r;
}

} // namespace wgcav
