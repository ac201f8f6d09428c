#include "doctest.h"

#include <cmath>

#include "wgcav/constants.hpp"
#include "wgcav/oracle.hpp"

using namespace wgcav;
using cd = std::complex<double>;

namespace {

constexpr double c0 = constants::speed_of_light;
constexpr double two_pi = 2.0 * constants::pi;

// First-radial-order WGM estimate: n k a = nu + 1.8557 nu^{1/3}, nu = l + 1/2.
int fundamental_l(double a, double n, double lambda) {
  const double nka = n * two_pi * a / lambda;
  double nu = nka;
  for (int it = 0; it < 8; ++it) nu = nka - 1.8557 * std::cbrt(nu);
  return static_cast<int>(std::lround(nu - 0.5));
}

LayeredRadialProblem uniform_sphere(double a, double n, ExactPolarization pol,
                                    int l) {
  LayeredRadialProblem p;
  p.polarization = pol;
  p.l = l;
  p.radii = {a};
  p.indices = {cd{n, 0.0}, cd{1.0, 0.0}};
  return p;
}

} // namespace

TEST_CASE("characteristic: degenerate layer reduces to the single interface") {
  const double a = 5e-6, t = 150e-9, n = 1.4564;
  LayeredRadialProblem stack;
  stack.polarization = ExactPolarization::TE;
  stack.l = 64;
  stack.radii = {a, a + t};
  stack.indices = {cd{n, 0.0}, cd{n, 0.0}, cd{1.0, 0.0}};

  LayeredRadialProblem single = uniform_sphere(a + t, n, ExactPolarization::TE, 64);

  for (double lam : {620e-9, 637e-9, 651e-9}) {
    const cd w{two_pi * c0 / lam, 0.0};
    const cd r1 = characteristic(stack, w);
    const cd r2 = characteristic(single, w);
    CHECK(std::abs(r1 - r2) < 1e-12);
  }
}

TEST_CASE("characteristic: zero-thickness layer is the identity transfer") {
  const double a = 5e-6, n1 = 1.4564, n2 = 1.59;
  LayeredRadialProblem stack;
  stack.polarization = ExactPolarization::TM;
  stack.l = 64;
  stack.radii = {a, a};  // t = 0
  stack.indices = {cd{n1, 0.0}, cd{n2, 0.0}, cd{1.0, 0.0}};

  LayeredRadialProblem single = uniform_sphere(a, n1, ExactPolarization::TM, 64);

  for (double lam : {625e-9, 640e-9}) {
    const cd w{two_pi * c0 / lam, 0.0};
    CHECK(std::abs(characteristic(stack, w) - characteristic(single, w)) < 1e-12);
  }
}

TEST_CASE("find_resonance: silica sphere root near 637 nm") {
  const double a = 5e-6, n = 1.4564;
  const int l = fundamental_l(a, n, 637e-9);
  const auto prob = uniform_sphere(a, n, ExactPolarization::TE, l);
  const auto res = find_resonance(prob, l, {600e-9, 680e-9}, 700);

  CHECK(res.lambda_res > 610e-9);
  CHECK(res.lambda_res < 670e-9);
  CHECK(res.omega.imag() < 0.0);
  CHECK(res.q_rad > 1e4);

  // residual at the root is tiny compared to the off-resonance scale (~1)
  CHECK(std::abs(characteristic(prob, res.omega)) < 1e-8);

  // doubled scan density locates the identical root
  const auto res2 = find_resonance(prob, l, {600e-9, 680e-9}, 1400);
  CHECK(std::abs(res2.omega - res.omega) <= 1e-9 * std::abs(res.omega));
}

TEST_CASE("find_resonance: coated root converges to uncoated as t -> 0") {
  const double a = 5e-6, n = 1.4564;
  const int l = fundamental_l(a, n, 637e-9);
  const auto bare = uniform_sphere(a, n, ExactPolarization::TE, l);
  const auto ref = find_resonance(bare, l, {600e-9, 680e-9}, 700);

  double prev_err = 1e9;
  for (double t : {50e-9, 10e-9, 2e-9}) {
    LayeredRadialProblem coated;
    coated.polarization = ExactPolarization::TE;
    coated.l = l;
    coated.radii = {a, a + t};
    coated.indices = {cd{n, 0.0}, cd{1.0, 0.0}, cd{1.0, 0.0}};  // coating == exterior
    const auto res = find_resonance(coated, l, {600e-9, 680e-9}, 700);
    const double err = std::abs(res.lambda_res - ref.lambda_res);
    CHECK(err < prev_err + 1e-15);
    prev_err = err;
  }
  CHECK(prev_err < 1e-12);
}

TEST_CASE("find_resonance: TE and TM roots are distinct") {
  const double a = 5e-6, n = 1.4564;
  const int l = fundamental_l(a, n, 637e-9);
  const auto te = find_resonance(uniform_sphere(a, n, ExactPolarization::TE, l),
                                 l, {590e-9, 690e-9}, 900);
  const auto tm = find_resonance(uniform_sphere(a, n, ExactPolarization::TM, l),
                                 l, {590e-9, 690e-9}, 900);
  CHECK(std::abs(te.lambda_res - tm.lambda_res) > 1e-10);
}

TEST_CASE("find_resonance: radiation Q grows with sphere radius") {
  const double n = 1.4564;
  double prev_q = 0.0;
  for (double a : {2.6e-6, 3.3e-6, 4.0e-6}) {
    const int l = fundamental_l(a, n, 637e-9);
    const auto res = find_resonance(uniform_sphere(a, n, ExactPolarization::TE, l),
                                    l, {580e-9, 700e-9}, 900);
    CHECK(res.q_rad > prev_q);
    prev_q = res.q_rad;
  }
}

TEST_CASE("find_resonance: empty or rootless bracket errors") {
  const auto prob = uniform_sphere(5e-6, 1.4564, ExactPolarization::TE, 64);
  CHECK_THROWS((void)find_resonance(prob, 64, {680e-9, 660e-9}));
  // a narrow bracket away from any l = 64 root has no interior minimum
  CHECK_THROWS((void)find_resonance(prob, 64, {800e-9, 801e-9}, 50));
}

TEST_CASE("cylinder characteristic and resonance") {
  CylinderProblem prob;
  prob.radius = 3e-6;
  prob.n_in = cd{1.4564, 0.0};
  prob.n_out = cd{1.0, 0.0};
  prob.polarization = CylinderPolarization::TMz;
  prob.m = fundamental_l(3e-6, 1.4564, 637e-9);

  const auto res = find_cylinder_resonance(prob, {590e-9, 690e-9}, 900);
  CHECK(res.lambda_res > 590e-9);
  CHECK(res.lambda_res < 690e-9);
  CHECK(res.omega.imag() < 0.0);
  CHECK(std::abs(cylinder_characteristic(prob, res.omega)) < 1e-8);

  CylinderProblem te = prob;
  te.polarization = CylinderPolarization::TEz;
  const auto res_te = find_cylinder_resonance(te, {590e-9, 690e-9}, 900);
  CHECK(std::abs(res_te.lambda_res - res.lambda_res) > 1e-10);
}
