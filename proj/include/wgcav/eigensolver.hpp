#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wgcav/operators.hpp"

namespace wgcav {

enum class Polarization { QuasiTE, QuasiTM };

const char* polarization_name(Polarization pol);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  int count = 6;
  double residual_tol = 1e-8;
  int krylov_dim = 48;
  int max_restarts = 2;
  double divergence_tol = 1e-3;   // relative div(eps E) filter for physical modes
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  int dense_threshold = 0;        // use a dense eigensolve at or below this size
  bool include_absorption = false;
  bool polish = true;             // dedicated-shift refinement of selected modes
  int polish_iterations = 10;
  double n_eff_guess = 0.0;       // 0 = derive from the core index
  int max_m_hops = 6;
  bool verbose = false;
};

/// One eigenmode: complex frequency, staggered field arrays (with boundary
/// zeros), and derived classification data. Fields are normalized so the
/// maximum of n^2 |E|^2 over physical cells is 1.
struct ModeSolution {
  int m = 0;
  std::complex<double> omega{0.0, 0.0};
  double lambda_res = 0.0;
  Polarization polarization = Polarization::QuasiTE;
  int radial_nodes = 0;
  int axial_nodes = 0;
  double residual = 0.0;
  double rel_divergence = 0.0;
  double peak_rho = 0.0, peak_z = 0.0;

  VectorC e_rho;  // nr x (nz+1), idx = i + j*nr         (rho centers, z nodes)
  VectorC e_phi;  // (nr+1) x (nz+1), idx = i + j*(nr+1) (nodes)
  VectorC e_z;    // (nr+1) x nz, idx = i + j*(nr+1)     (rho nodes, z centers)

  std::vector<double> cell_intensity;           // |E|^2 at cell centers
  std::vector<double> cell_weighted_intensity;  // n^2 |E|^2 at cell centers
  double comp_energy[3] = {0.0, 0.0, 0.0};  // n^2-weighted component energies
                                            // over the physical window
};

/// Q = Re(omega) / (2 |Im(omega)|); +infinity when the mode is lossless to
/// machine precision (the "beyond numerical floor" sentinel).
double quality_factor(std::complex<double> omega);

/// QuasiTE when the n^2-weighted E_z energy dominates E_rho.
Polarization classify(const ModeSolution& mode);

/// Shift-invert eigensearch near lambda_target: up to `count` converged
/// eigenpairs nearest sigma = (2 pi / lambda_target)^2, sorted by distance.
std::vector<ModeSolution> solve_near(const OperatorPair& op, const Grid& grid,
                                     double lambda_target, double n_eff_guess,
                                     int count, const SolveOptions& opts = {});

struct FundamentalResult {
  int m = 0;
  ModeSolution mode;
};

/// Scans azimuthal orders near 2 pi rim n_eff / lambda for the single-lobe
/// (fundamental) mode of the requested polarization closest to lambda_target.
FundamentalResult find_fundamental(const CrossSection& cs, Polarization pol,
                                   double lambda_target, const ResolutionSpec& res,
                                   const PmlSpec& pml, const SolveOptions& opts = {});

/// One shared scan per geometry: fundamentals of both polarizations, with the
/// lossless and (optionally) lossy eigenpairs of each.
struct GeometryModes {
  struct Entry {
    int m = 0;
    ModeSolution lossless;
    std::optional<ModeSolution> lossy;
  };
  std::optional<Entry> te, tm;
  Grid grid;
};

GeometryModes solve_geometry(const CrossSection& cs, double lambda_target,
                             const ResolutionSpec& res, const PmlSpec& pml,
                             const SolveOptions& opts, bool need_te, bool need_tm,
                             bool need_lossy);

/// Inverse iteration at a dedicated shift close to lambda0; refines one
/// eigenpair to near machine precision.
struct RefinedPair {
  std::complex<double> eigenvalue{0.0, 0.0};
  VectorC vec;
  double residual = 0.0;
};
RefinedPair refine_eigenpair(const OperatorPair& op, std::complex<double> lambda0,
                             const VectorC& v0, int iterations);

/// Rebuilds the derived ModeSolution data from a raw unknown vector.
ModeSolution make_mode_solution(const OperatorPair& op, const Grid& grid,
                                std::complex<double> eigenvalue, const VectorC& vec,
                                double residual);

} // namespace wgcav
