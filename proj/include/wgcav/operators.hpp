#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <complex>

#include "wgcav/grid.hpp"

namespace wgcav {

using SparseC = Eigen::SparseMatrix<std::complex<double>>;
using VectorC = Eigen::VectorXcd;

/// Interior-unknown index map over the staggered E components. Tangential E
/// vanishes on the window walls (PEC behind the PML), so:
///   E_rho: i in [0, nr), j in [1, nz)   (z-interior nodes)
///   E_phi: i in [1, nr), j in [1, nz)
///   E_z:   i in [1, nr), j in [0, nz)
struct FieldLayout {
  int nr = 0;
  int nz = 0;

  int n_rho() const { return nr * (nz - 1); }
  int n_phi() const { return (nr - 1) * (nz - 1); }
  int n_zc() const { return (nr - 1) * nz; }
  int total() const { return n_rho() + n_phi() + n_zc(); }

  int idx_rho(int i, int j) const { return i + (j - 1) * nr; }
  int idx_phi(int i, int j) const { return n_rho() + (i - 1) + (j - 1) * (nr - 1); }
  int idx_z(int i, int j) const { return n_rho() + n_phi() + (i - 1) + j * (nr - 1); }
};

/// Generalized eigenproblem A e = (omega/c)^2 B e for the curl-curl equation
/// with e^{i m phi} azimuthal dependence and PML-stretched derivatives.
/// B is diagonal (effective permittivity at the E locations).
struct OperatorPair {
  SparseC A;
  VectorC B;
  FieldLayout layout;
  int m = 0;
  double lambda_eval = 0.0;
  bool absorption = false;
  std::array<Medium, 3> media;
};

OperatorPair assemble(const Grid& grid, int m, const std::array<Medium, 3>& media,
                      double lambda_eval, bool include_absorption);

/// Discrete gradient from interior primal nodes (i in [1,nr), j in [1,nz))
/// to the E unknowns; spans the curl-curl null space exactly.
SparseC discrete_gradient(const Grid& grid, int m);

/// Discrete stretched divergence of a diagonal-weighted field, evaluated at
/// interior primal nodes: rows nodes x E-unknowns applied to (B .* e).
SparseC discrete_divergence(const Grid& grid, int m);

/// Cylindrical volume weights of each E unknown (for symmetry checks and
/// energy integrals over unknown vectors).
Eigen::VectorXd metric_weights(const Grid& grid);

/// Effective permittivity at one staggered location from subcell fractions:
/// inverse-blend of harmonic (normal component) and arithmetic (tangential).
std::complex<double> effective_eps(const SubcellEps& sc,
                                   const std::array<std::complex<double>, 3>& eps);

} // namespace wgcav
