#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "wgcav/geometry.hpp"

namespace wgcav {

/// Exact polarization of a spherically symmetric mode (not "quasi").
enum class ExactPolarization { TE, TM };

/// Radial matching problem for a concentric layer stack: indices innermost
/// to outermost, interface radii strictly increasing. TE matches (u, u');
/// TM matches (u, u'/n^2).
struct LayeredRadialProblem {
  ExactPolarization polarization = ExactPolarization::TE;
  int l = 1;
  std::vector<double> radii;                   // size = indices.size() - 1
  std::vector<std::complex<double>> indices;   // core, [layers...], exterior

  static LayeredRadialProblem from_sphere(const CrossSection& cs,
                                          ExactPolarization pol, int l,
                                          double lambda_for_loss,
                                          bool include_absorption);
};

/// Boundary-matching determinant, normalized by its largest entry so the
/// magnitude stays O(1) even at deep evanescence. Zero at a resonance.
std::complex<double> characteristic(const LayeredRadialProblem& prob,
                                    std::complex<double> omega);

struct ResonanceResult {
  double lambda_res = 0.0;
  double q_rad = 0.0;
  std::complex<double> omega{0.0, 0.0};
};

/// Real-axis |residual| minimum scan over the wavelength bracket followed by
/// complex secant refinement to relative 1e-10 in omega.
ResonanceResult find_resonance(const LayeredRadialProblem& prob, int l,
                               std::pair<double, double> lambda_bracket,
                               int scan_points = 600);

/// Uniform dielectric cylinder (z-invariant 2D limit), azimuthal order m.
/// TMz: E_z-polarized, matches (u, u'); TEz: H_z-polarized, matches (u, u'/n^2).
enum class CylinderPolarization { TMz, TEz };

struct CylinderProblem {
  double radius = 1e-6;
  std::complex<double> n_in{1.5, 0.0};
  std::complex<double> n_out{1.0, 0.0};
  int m = 1;
  CylinderPolarization polarization = CylinderPolarization::TMz;
};

std::complex<double> cylinder_characteristic(const CylinderProblem& prob,
                                             std::complex<double> omega);

ResonanceResult find_cylinder_resonance(const CylinderProblem& prob,
                                        std::pair<double, double> lambda_bracket,
                                        int scan_points = 600);

/// Complex secant iteration shared by the resonance finders.
std::complex<double> refine_complex_root(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> x0, std::complex<double> x1, double rel_tol = 1e-10,
    int max_iter = 100);

} // namespace wgcav
