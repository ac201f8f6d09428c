#include "wgcav/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

constexpr double kMinCornerSpacing = 0.8e-9;  // m

// One axis description: exact break coordinates, per-interval spacing
// plateau, and which breaks are material interfaces.
struct AxisSpec {
  std::vector<double> breaks;
  std::vector<double> plateau;
  std::vector<bool> interface_brk;
};

void append_break(AxisSpec& ax, double x, double h, bool iface) {
  // h is the plateau of the interval ending at x.
  if (!ax.breaks.empty() && x <= ax.breaks.back() + 1e-13) {
    // degenerate interval (t = 0): keep the break, drop the interval
    if (iface && !ax.interface_brk.empty()) ax.interface_brk.back() = true;
    return;
  }
  ax.breaks.push_back(x);
  ax.plateau.push_back(h);
  ax.interface_brk.push_back(iface);
}

// Fills each interval by equidistributing the spacing field
//   h(x) = min(plateau(x), min_j c_j + s |x - b_j|)
// which keeps adjacent-cell ratios within max_ratio and honors the plateaus.
std::vector<double> build_axis(const AxisSpec& ax, double max_ratio,
                               double interface_refine, int max_cells,
                               const char* axis_name) {
  const int n_int = static_cast<int>(ax.plateau.size());
  if (n_int < 1) throw std::runtime_error("build_axis: empty axis spec");
  const double slope = (max_ratio - 1.0) * 0.85;

  // Corner spacings at each break.
  const int n_brk = n_int + 1;
  std::vector<double> corner(n_brk);
  for (int j = 0; j < n_brk; ++j) {
    double c = std::min(j > 0 ? ax.plateau[j - 1] : ax.plateau[0],
                        j < n_int ? ax.plateau[j] : ax.plateau[n_int - 1]);
    if (ax.interface_brk[j]) c = std::max(c * interface_refine, kMinCornerSpacing);
    corner[j] = c;
  }

  auto spacing_at = [&](double x, int interval) {
    double h = ax.plateau[interval];
    for (int j = 0; j < n_brk; ++j)
      h = std::min(h, corner[j] + slope * std::abs(x - ax.breaks[j]));
    return h;
  };

  std::vector<double> edges;
  edges.push_back(ax.breaks[0]);
  for (int it = 0; it < n_int; ++it) {
    const double a = ax.breaks[it];
    const double b = ax.breaks[it + 1];
    const double len = b - a;
    // Fine sampling of 1/h for the equidistribution integral.
    double h_min = ax.plateau[it];
    h_min = std::min({h_min, corner[it], corner[it + 1]});
    int nsub = static_cast<int>(std::ceil(len / (0.2 * h_min)));
    nsub = std::clamp(nsub, 64, 2000000);
    std::vector<double> cum(nsub + 1, 0.0);
    double prev_inv = 1.0 / spacing_at(a, it);
    for (int k = 1; k <= nsub; ++k) {
      const double x = a + len * k / nsub;
      const double inv = 1.0 / spacing_at(x, it);
      cum[k] = cum[k - 1] + 0.5 * (prev_inv + inv) * (len / nsub);
      prev_inv = inv;
    }
    const double total = cum[nsub];
    const int n_cells = std::max(1, static_cast<int>(std::ceil(total - 1e-9)));
    if (static_cast<int>(edges.size()) + n_cells > max_cells)
      throw std::runtime_error(std::string("build_grid: cell budget exceeded on ") +
                               axis_name +
                               " axis (coating too thin for the grading "
                               "constraints within max_cells_per_axis)");
    // Invert the cumulative integral at uniform levels.
    int k = 0;
    for (int c = 1; c < n_cells; ++c) {
      const double level = total * c / n_cells;
      while (k < nsub && cum[k + 1] < level) ++k;
      const double frac = (level - cum[k]) / std::max(cum[k + 1] - cum[k], 1e-300);
      edges.push_back(a + len * (k + frac) / nsub);
    }
    edges.push_back(b);
  }
  return edges;
}

void append_pml(std::vector<double>& edges, int cells) {
  const size_t n = edges.size();
  const double h0 = edges[n - 1] - edges[n - 2];
  double x = edges.back();
  for (int k = 0; k < cells; ++k) {
    x += h0 * std::min(std::pow(1.25, k), 3.0);
    edges.push_back(x);
  }
}

void prepend_pml(std::vector<double>& edges, int cells) {
  const double h0 = edges[1] - edges[0];
  std::vector<double> pre;
  double x = edges.front();
  for (int k = 0; k < cells; ++k) {
    x -= h0 * std::min(std::pow(1.25, k), 3.0);
    pre.push_back(x);
  }
  std::reverse(pre.begin(), pre.end());
  edges.insert(edges.begin(), pre.begin(), pre.end());
}

// Mirrors a half axis [0, ...] onto [-end, ..., 0, ...].
std::vector<double> mirror_axis(const std::vector<double>& half) {
  std::vector<double> full;
  full.reserve(half.size() * 2 - 1);
  for (size_t k = half.size(); k-- > 1;) full.push_back(-half[k]);
  for (double x : half) full.push_back(x);
  return full;
}

struct BoxMediumSampler {
  const CrossSection& cs;

  // Volume fractions of each medium over box [r0,r1]x[z0,z1], rho-weighted.
  SubcellEps sample(double r0, double r1, double z0, double z1, double rho_pt,
                    double z_pt, FieldComp comp) const {
    SubcellEps out;
    const double rc = 0.5 * (r0 + r1), zc = 0.5 * (z0 + z1);
    const double halfdiag = 0.5 * std::hypot(r1 - r0, z1 - z0);
    const double d = cs.core_surface_distance(rc, zc);
    const double t = cs.thickness();
    int single = -1;
    if (d < -halfdiag) single = 0;
    else if (d > t + halfdiag) single = 2;
    else if (t > 0 && d > halfdiag && d < t - halfdiag) single = 1;
    if (single >= 0) {
      out.frac[single] = 1.0;
    } else {
      constexpr int K = 6;
      double w[3] = {0, 0, 0};
      double wsum = 0.0;
      for (int a = 0; a < K; ++a) {
        const double r = r0 + (r1 - r0) * (a + 0.5) / K;
        for (int b = 0; b < K; ++b) {
          const double z = z0 + (z1 - z0) * (b + 0.5) / K;
          const double wt = std::max(r, 1e-12);
          w[static_cast<int>(cs.medium_at(r, z))] += wt;
          wsum += wt;
        }
      }
      for (int q = 0; q < 3; ++q) out.frac[q] = w[q] / wsum;
    }
    if (comp == FieldComp::Phi) {
      out.normal_sq = 0.0;
    } else {
      const auto nrm = cs.layer_normal(rho_pt, z_pt);
      out.normal_sq = comp == FieldComp::Rho ? nrm[0] * nrm[0] : nrm[1] * nrm[1];
    }
    return out;
  }
};

} // namespace

int estimate_azimuthal_order(const CrossSection& cs, double lambda_target) {
  const double n_eff = 0.96 * cs.medium(MediumId::Core).n;
  return static_cast<int>(
      std::lround(2.0 * constants::pi * cs.rim_radius() * n_eff / lambda_target));
}

int Grid::rho_cell_at(double x) const {
  auto it = std::upper_bound(rho_edges.begin(), rho_edges.end(), x);
  int i = static_cast<int>(it - rho_edges.begin()) - 1;
  return std::clamp(i, 0, n_rho() - 1);
}

int Grid::z_cell_at(double x) const {
  auto it = std::upper_bound(z_edges.begin(), z_edges.end(), x);
  int j = static_cast<int>(it - z_edges.begin()) - 1;
  return std::clamp(j, 0, n_z() - 1);
}

Grid build_grid(const CrossSection& cs, const ResolutionSpec& res,
                const PmlSpec& pml, double lambda_target) {
  if (lambda_target <= 0.0)
    throw std::invalid_argument("build_grid: lambda_target must be positive");
  if (res.base_cells_per_wavelength < 8)
    throw std::invalid_argument("build_grid: base_cells_per_wavelength must be >= 8");
  if (res.min_cells_across_coating < 2)
    throw std::invalid_argument("build_grid: min_cells_across_coating must be >= 2");
  if (pml.thickness_cells < 4)
    throw std::invalid_argument("build_grid: PML thickness must be >= 4 cells");

  const double lam = lambda_target;
  const int cpw = res.base_cells_per_wavelength;
  const double h_core = lam / (cs.medium(MediumId::Core).n * cpw);
  const double h_coat_bulk = lam / (cs.medium(MediumId::Coating).n * cpw);
  const double h_air = lam / (cs.medium(MediumId::Exterior).n * cpw);
  const double t = cs.thickness();
  const double h_coat =
      t > 0 ? std::max(std::min(h_coat_bulk, t / res.min_cells_across_coating),
                       0.25e-9)
            : h_coat_bulk;

  const int m_est = estimate_azimuthal_order(cs, lam);
  const double rim = cs.rim_radius();
  const double outer = cs.outer_radius();
  const double caustic = m_est * lam / (2.0 * constants::pi);
  const double rho_pad_end =
      std::max(outer + res.window_padding, caustic + 0.35e-6);

  // ---- rho axis ----
  AxisSpec rho_ax;
  if (const auto* tor = std::get_if<CoatedToroid>(&cs.shape())) {
    const double R = tor->major_radius, Rm = tor->minor_radius;
    double rho_lo = R / 4.0;
    const double inner_edge = R - Rm - t;
    if (rho_lo > inner_edge - 0.25e-6)
      rho_lo = std::max(0.05e-6, 0.3 * inner_edge);
    rho_ax.breaks.push_back(rho_lo);
    rho_ax.interface_brk.push_back(false);
    append_break(rho_ax, inner_edge, 1.75 * h_core, t > 0);
    append_break(rho_ax, R - Rm, t > 0 ? h_coat : 1.75 * h_core, true);
    append_break(rho_ax, R + Rm, h_core, true);
    append_break(rho_ax, R + Rm + t, h_coat, t > 0);
    append_break(rho_ax, rho_pad_end, h_air, false);
  } else if (const auto* sph = std::get_if<CoatedSphere>(&cs.shape())) {
    const double a = sph->core_radius;
    const double rho_lo = a / 4.0;
    const double band = std::max(rho_lo + 0.2e-6, a - 1.4e-6);
    rho_ax.breaks.push_back(rho_lo);
    rho_ax.interface_brk.push_back(false);
    append_break(rho_ax, band, 1.75 * h_core, false);
    append_break(rho_ax, a, h_core, true);
    append_break(rho_ax, a + t, h_coat, t > 0);
    append_break(rho_ax, rho_pad_end, h_air, false);
  } else {
    const double a = std::get<Cylinder>(cs.shape()).radius;
    const double rho_lo = a / 4.0;
    const double band = std::max(rho_lo + 0.15e-6, a - 1.2e-6);
    rho_ax.breaks.push_back(rho_lo);
    rho_ax.interface_brk.push_back(false);
    append_break(rho_ax, band, 1.75 * h_core, false);
    append_break(rho_ax, a, h_core, true);
    append_break(rho_ax, rho_pad_end, h_air, false);
  }

  std::vector<double> rho_edges =
      build_axis(rho_ax, res.max_grading_ratio, res.interface_refinement,
                 res.max_cells_per_axis, "rho");
  append_pml(rho_edges, pml.thickness_cells);

  // ---- z axis (built as a half axis from the equator, then mirrored) ----
  AxisSpec z_ax;
  z_ax.breaks.push_back(0.0);
  z_ax.interface_brk.push_back(false);
  if (const auto* tor = std::get_if<CoatedToroid>(&cs.shape())) {
    append_break(z_ax, tor->minor_radius, h_core, true);
    append_break(z_ax, tor->minor_radius + t, h_coat, t > 0);
    append_break(z_ax, tor->minor_radius + t + res.window_padding, h_air, false);
  } else if (const auto* sph = std::get_if<CoatedSphere>(&cs.shape())) {
    const double a = sph->core_radius;
    const double ext = a / std::sqrt(std::max(1.0, static_cast<double>(m_est)));
    const double z_fine = std::min(0.6 * a, 1.9 * ext);
    const double z_body = std::min(a + t, 3.8 * ext + t);
    append_break(z_ax, z_fine, h_core, false);
    append_break(z_ax, z_body, 2.0 * h_core, false);
    append_break(z_ax, z_body + res.window_padding, h_air, false);
  } else {
    const double z_half = std::max(0.45e-6, 0.75 * lam);
    append_break(z_ax, z_half, 1.5 * h_core, false);
    append_break(z_ax, z_half + std::min(res.window_padding, 0.6e-6), h_air,
                 false);
  }
  std::vector<double> z_half_edges =
      build_axis(z_ax, res.max_grading_ratio, res.interface_refinement,
                 res.max_cells_per_axis, "z");
  std::vector<double> z_edges = mirror_axis(z_half_edges);
  append_pml(z_edges, pml.thickness_cells);
  prepend_pml(z_edges, pml.thickness_cells);

  Grid g;
  g.rho_edges = std::move(rho_edges);
  g.z_edges = std::move(z_edges);
  g.pml_cells_rho = pml.thickness_cells;
  g.pml_cells_z_lo = pml.thickness_cells;
  g.pml_cells_z_hi = pml.thickness_cells;
  g.pml_spec = pml;
  g.lambda_target = lam;
  g.m_estimate = m_est;

  const int nr = g.n_rho(), nz = g.n_z();
  g.rho_centers.resize(nr);
  g.z_centers.resize(nz);
  for (int i = 0; i < nr; ++i)
    g.rho_centers[i] = 0.5 * (g.rho_edges[i] + g.rho_edges[i + 1]);
  for (int j = 0; j < nz; ++j)
    g.z_centers[j] = 0.5 * (g.z_edges[j] + g.z_edges[j + 1]);

  g.cell_medium.resize(static_cast<size_t>(nr) * nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i)
      g.cell_medium[g.cell_index(i, j)] = cs.medium_at(g.rho_centers[i], g.z_centers[j]);

  // Verify the coating layer count along the equator (outer rim side).
  if (t > 0) {
    int cnt = 0;
    const int j_eq = g.z_cell_at(1e-15);
    for (int i = 0; i < nr; ++i) {
      if (g.rho_centers[i] > rim && g.rho_centers[i] < outer &&
          g.medium_of_cell(i, j_eq) == MediumId::Coating)
        ++cnt;
    }
    if (cnt < res.min_cells_across_coating)
      throw std::runtime_error(
          "build_grid: coating annulus is not resolved by min_cells_across_coating "
          "cells along the equator");
  }

  // Subcell permittivity data at the staggered E locations.
  const BoxMediumSampler sampler{cs};
  const auto& re = g.rho_edges;
  const auto& ze = g.z_edges;
  auto rho_dual_lo = [&](int i) { return i == 0 ? re[0] : g.rho_centers[i - 1]; };
  auto rho_dual_hi = [&](int i) { return i == nr ? re[nr] : g.rho_centers[i]; };
  auto z_dual_lo = [&](int j) { return j == 0 ? ze[0] : g.z_centers[j - 1]; };
  auto z_dual_hi = [&](int j) { return j == nz ? ze[nz] : g.z_centers[j]; };

  g.eps_rho.resize(static_cast<size_t>(nr) * (nz + 1));
  for (int j = 0; j <= nz; ++j)
    for (int i = 0; i < nr; ++i)
      g.eps_rho[i + static_cast<size_t>(j) * nr] =
          sampler.sample(re[i], re[i + 1], z_dual_lo(j), z_dual_hi(j),
                         g.rho_centers[i], ze[j], FieldComp::Rho);

  g.eps_phi.resize(static_cast<size_t>(nr + 1) * (nz + 1));
  for (int j = 0; j <= nz; ++j)
    for (int i = 0; i <= nr; ++i)
      g.eps_phi[i + static_cast<size_t>(j) * (nr + 1)] =
          sampler.sample(rho_dual_lo(i), rho_dual_hi(i), z_dual_lo(j),
                         z_dual_hi(j), re[i], ze[j], FieldComp::Phi);

  g.eps_z.resize(static_cast<size_t>(nr + 1) * nz);
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i <= nr; ++i)
      g.eps_z[i + static_cast<size_t>(j) * (nr + 1)] =
          sampler.sample(rho_dual_lo(i), rho_dual_hi(i), ze[j], ze[j + 1],
                         re[i], g.z_centers[j], FieldComp::Z);

  return g;
}

std::complex<double> stretch_factor(double x, Axis axis, const PmlSpec& pml,
                                    const Grid& grid) {
  double d = 0.0;
  if (axis == Axis::Rho) {
    const double start = grid.rho_window_hi();
    const double end = grid.rho_edges.back();
    if (x > start) d = (x - start) / (end - start);
  } else {
    const double lo_end = grid.z_window_lo();
    const double hi_start = grid.z_window_hi();
    if (x < lo_end)
      d = (lo_end - x) / (lo_end - grid.z_edges.front());
    else if (x > hi_start)
      d = (x - hi_start) / (grid.z_edges.back() - hi_start);
  }
  if (d <= 0.0) return {1.0, 0.0};
  d = std::min(d, 1.0);
  return {1.0, -pml.max_stretch_imag * std::pow(d, pml.profile_order)};
}

void dump_grid(const Grid& grid, std::ostream& os) {
  os << "# grid " << grid.n_rho() << " x " << grid.n_z() << " cells, lambda_target "
     << grid.lambda_target << " m, m_estimate " << grid.m_estimate << "\n";
  os << "# rho_edges_m";
  for (double x : grid.rho_edges) os << ' ' << x;
  os << "\n# z_edges_m";
  for (double x : grid.z_edges) os << ' ' << x;
  os << "\n# medium map (rows: z index ascending; 0=core 1=coating 2=exterior)\n";
  for (int j = 0; j < grid.n_z(); ++j) {
    for (int i = 0; i < grid.n_rho(); ++i)
      os << static_cast<int>(grid.medium_of_cell(i, j));
    os << '\n';
  }
}

} // namespace wgcav
