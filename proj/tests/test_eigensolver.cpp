#include "doctest.h"

#include <cmath>
#include <iostream>

#include "test_util.hpp"
#include "wgcav/constants.hpp"
#include "wgcav/eigensolver.hpp"
#include "wgcav/oracle.hpp"

using namespace wgcav;
using wgtest::air;
using wgtest::silica;
using wgtest::su8;
using cd = std::complex<double>;

TEST_CASE("quality_factor") {
  const double w0 = 2.96e15;
  CHECK(quality_factor(cd{w0, -w0 * 2.5e-7}) == doctest::Approx(2e6).epsilon(1e-12));
  CHECK(quality_factor(cd{w0, -w0 * 5e-9}) == doctest::Approx(1e8).epsilon(1e-12));
  CHECK(std::isinf(quality_factor(cd{w0, 0.0})));
}

TEST_CASE("classify on synthetic single-component modes") {
  const CrossSection cs(CoatedToroid{2.5e-6, 1e-6, 100e-9}, {silica, su8, air});
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  res.min_cells_across_coating = 2;
  const Grid g = build_grid(cs, res, PmlSpec{}, 637e-9);
  const OperatorPair op = assemble(g, 25, cs.media(), 637e-9, false);
  const FieldLayout& L = op.layout;

  VectorC only_z = VectorC::Zero(L.total());
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 1; i < g.n_rho(); ++i) only_z[L.idx_z(i, j)] = 1.0;
  const ModeSolution te = make_mode_solution(op, g, cd{1e14, 0.0}, only_z, 0.0);
  CHECK(classify(te) == Polarization::QuasiTE);

  VectorC only_rho = VectorC::Zero(L.total());
  for (int j = 1; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_rho(); ++i) only_rho[L.idx_rho(i, j)] = 1.0;
  const ModeSolution tm = make_mode_solution(op, g, cd{1e14, 0.0}, only_rho, 0.0);
  CHECK(classify(tm) == Polarization::QuasiTM);
}

TEST_CASE("solve_near matches the cylinder oracle (2D limit)" *
          doctest::timeout(600)) {
  // uniform silica cylinder: the z-invariant TM_z (E_z) mode family is exact
  // on the staggered grid, so this validates the radial discretization, the
  // rho PML, and the eigensolver against the analytic root.
  const double a = 3e-6;
  const CrossSection cs(Cylinder{a}, {silica, su8, air});
  const int m = wgtest::fundamental_order(a, silica.n, 637e-9);

  CylinderProblem prob;
  prob.radius = a;
  prob.n_in = cd{silica.n, 0.0};
  prob.n_out = cd{1.0, 0.0};
  prob.m = m;
  prob.polarization = CylinderPolarization::TMz;
  const ResonanceResult oracle = find_cylinder_resonance(prob, {590e-9, 700e-9}, 900);

  ResolutionSpec res;
  res.base_cells_per_wavelength = 12;
  const Grid g = build_grid(cs, res, PmlSpec{}, oracle.lambda_res);
  const OperatorPair op = assemble(g, m, cs.media(), oracle.lambda_res, false);

  SolveOptions opts;
  opts.count = 6;
  const std::vector<ModeSolution> modes =
      solve_near(op, g, oracle.lambda_res, 1.3, 6, opts);
  REQUIRE(!modes.empty());

  // nearest mode to the oracle root
  double best = 1e9;
  const ModeSolution* hit = nullptr;
  for (const auto& mode : modes) {
    const double err = std::abs(mode.lambda_res - oracle.lambda_res);
    if (err < best) {
      best = err;
      hit = &mode;
    }
  }
  REQUIRE(hit != nullptr);
  const double rel_err = best / oracle.lambda_res;
  std::cerr << "cylinder: oracle lambda=" << oracle.lambda_res
            << " solver lambda=" << hit->lambda_res << " rel_err=" << rel_err
            << " oracle Q=" << oracle.q_rad
            << " solver Q=" << quality_factor(hit->omega)
            << " div=" << hit->rel_divergence << "\n";
  CHECK(rel_err < 1e-3);
  CHECK(hit->rel_divergence < 1e-3);
  if (oracle.q_rad <= 1e9) {
    const double dlog =
        std::abs(std::log10(quality_factor(hit->omega)) - std::log10(oracle.q_rad));
    CHECK(dlog < 0.5);
  }
  // sorted by distance from the shift
  const double sigma = std::pow(2.0 * constants::pi / oracle.lambda_res, 2);
  for (size_t k = 1; k < modes.size(); ++k) {
    const double da =
        std::abs(std::pow(modes[k - 1].omega / constants::speed_of_light, 2) - sigma);
    const double db =
        std::abs(std::pow(modes[k].omega / constants::speed_of_light, 2) - sigma);
    CHECK(da <= db * (1.0 + 1e-9));
  }
  CHECK(static_cast<int>(modes.size()) <= 6);
}

TEST_CASE("dense fallback agrees with Arnoldi on a tiny problem" *
          doctest::timeout(600)) {
  const CrossSection cs(Cylinder{0.8e-6}, {silica, su8, air});
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  res.window_padding = 0.25e-6;
  PmlSpec pml;
  pml.thickness_cells = 4;
  const Grid g = build_grid(cs, res, pml, 1.3e-6);
  const OperatorPair op = assemble(g, 5, cs.media(), 1.3e-6, false);
  REQUIRE(op.layout.total() < 4000);

  SolveOptions arn;
  arn.count = 3;
  arn.residual_tol = 1e-9;
  const auto modes_arn = solve_near(op, g, 1.3e-6, 1.3, 3, arn);

  SolveOptions dense = arn;
  dense.dense_threshold = 100000;
  const auto modes_dense = solve_near(op, g, 1.3e-6, 1.3, 3, dense);

  REQUIRE(!modes_arn.empty());
  REQUIRE(!modes_dense.empty());
  for (const auto& ma : modes_arn) {
    double best = 1e9;
    for (const auto& md : modes_dense)
      best = std::min(best,
                      std::abs(ma.omega - md.omega) / std::abs(md.omega));
    CHECK(best < 1e-7);
  }
}
