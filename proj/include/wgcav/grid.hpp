#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wgcav/geometry.hpp"

namespace wgcav {

/// Mesh density targets. base_cells_per_wavelength applies in the densest
/// medium; the coating annulus is additionally resolved by
/// min_cells_across_coating cell layers along the equator.
struct ResolutionSpec {
  int base_cells_per_wavelength = 12;
  int min_cells_across_coating = 4;
  double window_padding = 1.5e-6;      // air gap between coating rim and PML (m)
  double max_grading_ratio = 1.5;      // adjacent-cell size ratio cap
  double interface_refinement = 0.5;   // extra corner refinement at material interfaces
  int max_cells_per_axis = 4000;
};

/// Polynomial-graded complex coordinate stretch for the absorbing layer.
struct PmlSpec {
  int thickness_cells = 12;
  int profile_order = 2;
  double max_stretch_imag = 4.0;
};

enum class Axis { Rho, Z };

/// Field component of the e^{i m phi} vector mode.
enum class FieldComp { Rho = 0, Phi = 1, Z = 2 };

/// Subcell material data for one staggered field location: volume fractions
/// of each medium over the location's dual box plus the squared projection
/// of the local layer normal onto the component direction.
struct SubcellEps {
  double frac[3] = {0.0, 0.0, 0.0};
  double normal_sq = 0.0;
};

/// Staggered nonuniform tensor grid over the (rho, z) window.
///
/// Cell (i, j) spans [rho_edges[i], rho_edges[i+1]] x [z_edges[j], z_edges[j+1]].
/// Staggering map (Yee in the half-plane, azimuthal dependence analytic):
///   E_rho at (rho_center(i), z_edge(j))    H_rho at (rho_edge(i), z_center(j))
///   E_phi at (rho_edge(i),  z_edge(j))     H_phi at (rho_center(i), z_center(j))
///   E_z   at (rho_edge(i),  z_center(j))   H_z   at (rho_center(i), z_edge(j))
struct Grid {
  std::vector<double> rho_edges;
  std::vector<double> z_edges;
  std::vector<double> rho_centers;
  std::vector<double> z_centers;
  std::vector<MediumId> cell_medium;  // idx = i + j * n_rho()

  // Subcell permittivity inputs per E-component location.
  std::vector<SubcellEps> eps_rho;  // n_rho x (n_z+1), idx = i + j*n_rho
  std::vector<SubcellEps> eps_phi;  // (n_rho+1) x (n_z+1)
  std::vector<SubcellEps> eps_z;    // (n_rho+1) x n_z

  // PML cell counts at the three absorbing walls (inner rho wall is a hard zero).
  int pml_cells_rho = 0;
  int pml_cells_z_lo = 0;
  int pml_cells_z_hi = 0;
  PmlSpec pml_spec;

  double lambda_target = 0.0;
  int m_estimate = 0;

  int n_rho() const { return static_cast<int>(rho_edges.size()) - 1; }
  int n_z() const { return static_cast<int>(z_edges.size()) - 1; }

  int cell_index(int i, int j) const { return i + j * n_rho(); }
  MediumId medium_of_cell(int i, int j) const { return cell_medium[cell_index(i, j)]; }

  double drho(int i) const { return rho_edges[i + 1] - rho_edges[i]; }
  double dz(int j) const { return z_edges[j + 1] - z_edges[j]; }

  // Physical (non-PML) window bounds.
  double rho_window_lo() const { return rho_edges.front(); }
  double rho_window_hi() const { return rho_edges[n_rho() - pml_cells_rho]; }
  double z_window_lo() const { return z_edges[pml_cells_z_lo]; }
  double z_window_hi() const { return z_edges[n_z() - pml_cells_z_hi]; }

  bool cell_in_pml(int i, int j) const {
    return i >= n_rho() - pml_cells_rho || j < pml_cells_z_lo ||
           j >= n_z() - pml_cells_z_hi;
  }

  /// Index of the first cell column whose center lies at or beyond x (rho axis).
  int rho_cell_at(double x) const;
  int z_cell_at(double x) const;
};

/// Builds the graded staggered grid around the cavity: feature edges snapped
/// to material interfaces, spacing targets honored, PML appended outside the
/// physical window. Throws if the coating cannot be resolved within
/// max_cells_per_axis.
Grid build_grid(const CrossSection& cs, const ResolutionSpec& res,
                const PmlSpec& pml, double lambda_target);

/// Complex derivative multiplier of the coordinate stretch: exactly 1 inside
/// the physical window, 1 - i*max_stretch_imag*d^order at normalized PML
/// depth d.
std::complex<double> stretch_factor(double x, Axis axis, const PmlSpec& pml,
                                    const Grid& grid);

/// Estimated fundamental azimuthal order at the target wavelength.
int estimate_azimuthal_order(const CrossSection& cs, double lambda_target);

/// Plain-text dump of coordinates and the medium map.
void dump_grid(const Grid& grid, std::ostream& os);

} // namespace wgcav
