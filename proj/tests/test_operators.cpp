#include "doctest.h"

#include <Eigen/Dense>
#include <random>

#include "test_util.hpp"
#include "wgcav/operators.hpp"

using namespace wgcav;
using wgtest::air;
using wgtest::silica;
using wgtest::su8;
using cd = std::complex<double>;

namespace {

VectorC random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  VectorC v(n);
  for (int i = 0; i < n; ++i) v[i] = cd{nd(rng), nd(rng)};
  return v;
}

Grid small_uniform_grid(PmlSpec pml) {
  // all-air cylinder: uniform medium n = 1
  const CrossSection cs(Cylinder{0.8e-6}, {air, air, air});
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  res.window_padding = 0.3e-6;
  return build_grid(cs, res, pml, 1.3e-6);
}

} // namespace

TEST_CASE("assemble: uniform n=1, PML off -> B is one, A Hermitian under metric") {
  PmlSpec pml;
  pml.thickness_cells = 4;
  pml.max_stretch_imag = 0.0;  // disabled stretch: identity everywhere
  const Grid g = small_uniform_grid(pml);
  const OperatorPair op = assemble(g, 3, {air, air, air}, 1.3e-6, false);

  for (int k = 0; k < op.B.size(); ++k) {
    CHECK(op.B[k].real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(op.B[k].imag() == 0.0);
  }

  const Eigen::VectorXd w = metric_weights(g);
  Eigen::MatrixXcd M(op.A);
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c)
      M(r, c) *= std::sqrt(w[r] / w[c]);
  const double asym = (M - M.adjoint()).norm() / M.norm();
  CHECK(asym < 1e-12);
}

TEST_CASE("assemble: absorption toggle changes only lossy entries of B") {
  const CrossSection cs(CoatedToroid{2.5e-6, 1e-6, 150e-9}, {silica, su8, air});
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  res.min_cells_across_coating = 2;
  PmlSpec pml;
  pml.thickness_cells = 4;
  const Grid g = build_grid(cs, res, pml, 637e-9);

  const OperatorPair op0 = assemble(g, 30, cs.media(), 637e-9, false);
  const OperatorPair op1 = assemble(g, 30, cs.media(), 637e-9, true);

  // A identical, B unchanged exactly where no lossy material contributes
  CHECK((op0.A - op1.A).norm() == 0.0);
  int changed = 0, unchanged_air = 0;
  const FieldLayout& L = op0.layout;
  const int nr = g.n_rho(), nz = g.n_z();
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      const auto& sc = g.eps_rho[i + static_cast<size_t>(j) * nr];
      const cd d = op1.B[L.idx_rho(i, j)] - op0.B[L.idx_rho(i, j)];
      if (sc.frac[0] == 0.0 && sc.frac[1] == 0.0) {
        CHECK(d == cd{0.0, 0.0});
        ++unchanged_air;
      } else if (d != cd{0.0, 0.0}) {
        ++changed;
      }
    }
  CHECK(changed > 0);
  CHECK(unchanged_air > 0);
}

TEST_CASE("discrete curl-curl annihilates discrete gradients (with PML on)") {
  const CrossSection cs(CoatedToroid{2.5e-6, 1e-6, 100e-9}, {silica, su8, air});
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  res.min_cells_across_coating = 2;
  const Grid g = build_grid(cs, res, PmlSpec{}, 637e-9);
  const OperatorPair op = assemble(g, 25, cs.media(), 637e-9, false);

  const SparseC G = discrete_gradient(g, 25);
  const VectorC psi = random_vector(static_cast<int>(G.cols()), 7);
  const VectorC e_grad = G * psi;
  const VectorC v = random_vector(op.layout.total(), 8);

  const double junk = (op.A * e_grad).norm() / e_grad.norm();
  const double typical = (op.A * v).norm() / v.norm();
  CHECK(junk < 1e-10 * typical);
}

TEST_CASE("discrete divergence annihilates the curl-curl range") {
  const CrossSection cs(CoatedToroid{2.5e-6, 1e-6, 100e-9}, {silica, su8, air});
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  res.min_cells_across_coating = 2;
  const Grid g = build_grid(cs, res, PmlSpec{}, 637e-9);
  const OperatorPair op = assemble(g, 25, cs.media(), 637e-9, false);
  const SparseC DIV = discrete_divergence(g, 25);

  const VectorC v = random_vector(op.layout.total(), 3);
  const VectorC av = op.A * v;
  const double q_curl = (DIV * av).norm();
  const VectorC r = random_vector(op.layout.total(), 4) * (av.norm() / std::sqrt(2.0 * op.layout.total()));
  const double q_rand = (DIV * r).norm();
  CHECK(q_curl < 1e-10 * q_rand);
}

TEST_CASE("effective_eps: pure cells and blend limits") {
  std::array<cd, 3> eps = {cd{2.0, 0.0}, cd{3.0, 0.0}, cd{1.0, 0.0}};
  SubcellEps pure;
  pure.frac[1] = 1.0;
  pure.normal_sq = 0.7;
  CHECK(effective_eps(pure, eps).real() == doctest::Approx(3.0));

  SubcellEps mix;  // half core, half exterior
  mix.frac[0] = 0.5;
  mix.frac[2] = 0.5;
  mix.normal_sq = 0.0;  // tangential: arithmetic mean
  CHECK(effective_eps(mix, eps).real() == doctest::Approx(1.5));
  mix.normal_sq = 1.0;  // normal: harmonic mean
  CHECK(effective_eps(mix, eps).real() == doctest::Approx(2.0 / 1.5));
}
