#include "doctest.h"

#include <set>
#include <sstream>

#include "wgcav/grid.hpp"

using namespace wgcav;

namespace {

const Medium silica{"silica", 1.4564, 1e-5};
const Medium su8{"SU-8", 1.59, 0.01};
const Medium air{"air", 1.0, 0.0};

CrossSection toroid(double R, double Rm, double t) {
  return CrossSection(CoatedToroid{R, Rm, t}, {silica, su8, air});
}

} // namespace

TEST_CASE("build_grid: coating resolved along the equator") {
  const auto cs = toroid(4e-6, 1e-6, 150e-9);
  ResolutionSpec res;
  res.min_cells_across_coating = 4;
  const Grid g = build_grid(cs, res, PmlSpec{}, 637e-9);

  // >= 4 radial cell layers inside [5um, 5.15um] at z = 0
  const int j_eq = g.z_cell_at(1e-12);
  int in_coating = 0;
  for (int i = 0; i < g.n_rho(); ++i)
    if (g.rho_centers[i] > 5e-6 && g.rho_centers[i] < 5.15e-6 &&
        g.medium_of_cell(i, j_eq) == MediumId::Coating)
      ++in_coating;
  CHECK(in_coating >= 4);

  // strictly increasing coordinates
  for (int i = 0; i < g.n_rho(); ++i) CHECK(g.drho(i) > 0.0);
  for (int j = 0; j < g.n_z(); ++j) CHECK(g.dz(j) > 0.0);
}

TEST_CASE("build_grid: grading ratio cap") {
  const auto cs = toroid(4e-6, 1e-6, 50e-9);
  const Grid g = build_grid(cs, ResolutionSpec{}, PmlSpec{}, 637e-9);
  const double cap = 1.5 * 1.02;
  for (int i = 0; i + 1 < g.n_rho(); ++i) {
    const double r = g.drho(i + 1) / g.drho(i);
    CHECK(r < cap);
    CHECK(r > 1.0 / cap);
  }
  for (int j = 0; j + 1 < g.n_z(); ++j) {
    const double r = g.dz(j + 1) / g.dz(j);
    CHECK(r < cap);
    CHECK(r > 1.0 / cap);
  }
}

TEST_CASE("build_grid: t = 0 has no coating cells") {
  const auto cs = toroid(4e-6, 1e-6, 0.0);
  const Grid g = build_grid(cs, ResolutionSpec{}, PmlSpec{}, 637e-9);
  std::set<MediumId> seen;
  for (MediumId id : g.cell_medium) seen.insert(id);
  CHECK(seen.count(MediumId::Coating) == 0);
  CHECK(seen.count(MediumId::Core) == 1);
  CHECK(seen.count(MediumId::Exterior) == 1);
}

TEST_CASE("build_grid: cell media agree with medium_at at cell centers") {
  const auto cs = toroid(4e-6, 1e-6, 150e-9);
  const Grid g = build_grid(cs, ResolutionSpec{}, PmlSpec{}, 637e-9);
  for (int j = 0; j < g.n_z(); ++j)
    for (int i = 0; i < g.n_rho(); ++i)
      REQUIRE(g.medium_of_cell(i, j) ==
              cs.medium_at(g.rho_centers[i], g.z_centers[j]));
}

TEST_CASE("build_grid: doubling resolution halves spacings in the window") {
  const auto cs = toroid(4e-6, 1e-6, 150e-9);
  ResolutionSpec res;
  const Grid g1 = build_grid(cs, res, PmlSpec{}, 637e-9);
  res.base_cells_per_wavelength *= 2;
  const Grid g2 = build_grid(cs, res, PmlSpec{}, 637e-9);
  // compare local spacing at a few probe points inside the physical window
  for (double probe : {2.2e-6, 4.0e-6, 5.05e-6, 5.8e-6}) {
    const double h1 = g1.drho(g1.rho_cell_at(probe));
    const double h2 = g2.drho(g2.rho_cell_at(probe));
    CHECK(h2 <= 0.56 * h1);
  }
}

TEST_CASE("build_grid: error when the coating cannot be resolved") {
  const auto cs = toroid(4e-6, 1e-6, 5e-9);
  ResolutionSpec res;
  res.max_cells_per_axis = 60;  // absurdly small budget
  CHECK_THROWS_WITH_AS(
      (void)build_grid(cs, res, PmlSpec{}, 637e-9),
      doctest::Contains("cell budget exceeded"), std::runtime_error);
}

TEST_CASE("stretch_factor: identity inside window, graded ramp in the PML") {
  const auto cs = toroid(4e-6, 1e-6, 100e-9);
  PmlSpec pml;
  pml.profile_order = 2;
  pml.max_stretch_imag = 5.0;
  const Grid g = build_grid(cs, ResolutionSpec{}, pml, 637e-9);

  const auto s_mid = stretch_factor(4e-6, Axis::Rho, pml, g);
  CHECK(s_mid.real() == 1.0);
  CHECK(s_mid.imag() == 0.0);

  const auto s_wall = stretch_factor(g.rho_edges.back(), Axis::Rho, pml, g);
  CHECK(s_wall.real() == doctest::Approx(1.0));
  CHECK(s_wall.imag() == doctest::Approx(-5.0));

  const double start = g.rho_window_hi();
  const double end = g.rho_edges.back();
  const auto s_half = stretch_factor(0.5 * (start + end), Axis::Rho, pml, g);
  CHECK(s_half.imag() == doctest::Approx(-1.25));

  // continuous at the window/PML boundary
  const auto s_entry = stretch_factor(start, Axis::Rho, pml, g);
  CHECK(s_entry == std::complex<double>(1.0, 0.0));

  // z-side PMLs
  const auto s_zlo = stretch_factor(g.z_edges.front(), Axis::Z, pml, g);
  CHECK(s_zlo.imag() == doctest::Approx(-5.0));
  CHECK(stretch_factor(0.0, Axis::Z, pml, g) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("grid refinement nests constraint sets") {
  const auto cs = toroid(4e-6, 1e-6, 100e-9);
  ResolutionSpec coarse;
  coarse.base_cells_per_wavelength = 8;
  ResolutionSpec fine = coarse;
  fine.base_cells_per_wavelength = 16;
  const Grid gc = build_grid(cs, coarse, PmlSpec{}, 637e-9);
  const Grid gf = build_grid(cs, fine, PmlSpec{}, 637e-9);
  // the finer grid satisfies every coarse spacing constraint
  for (double probe : {3.2e-6, 5.05e-6}) {
    CHECK(gf.drho(gf.rho_cell_at(probe)) <= gc.drho(gc.rho_cell_at(probe)));
  }
  CHECK(gf.n_rho() > gc.n_rho());
}

TEST_CASE("z axis is symmetric about the equator and snapped at z = 0") {
  const auto cs = toroid(4e-6, 1e-6, 150e-9);
  const Grid g = build_grid(cs, ResolutionSpec{}, PmlSpec{}, 637e-9);
  bool has_zero = false;
  for (double z : g.z_edges)
    if (z == 0.0) has_zero = true;
  CHECK(has_zero);
  const int nz = g.n_z();
  for (int j = 0; j < nz; ++j)
    CHECK(g.dz(j) == doctest::Approx(g.dz(nz - 1 - j)).epsilon(1e-12));
}

TEST_CASE("dump_grid emits coordinates and the medium map") {
  const auto cs = toroid(4e-6, 1e-6, 100e-9);
  ResolutionSpec res;
  res.base_cells_per_wavelength = 8;
  const Grid g = build_grid(cs, res, PmlSpec{}, 637e-9);
  std::ostringstream os;
  dump_grid(g, os);
  const std::string s = os.str();
  CHECK(s.find("rho_edges_m") != std::string::npos);
  CHECK(s.find("medium map") != std::string::npos);
}
