#include "doctest.h"

#include <cmath>
#include <random>

#include "wgcav/bessel.hpp"

using namespace wgcav;
using cd = std::complex<double>;

TEST_CASE("spherical_bessel: closed forms at l = 0") {
  const auto s = spherical_bessel(0, cd{1.0, 0.0});
  CHECK(s.j.real() == doctest::Approx(0.8414709848).epsilon(1e-10));
  CHECK(s.j.imag() == doctest::Approx(0.0));
  // h_0^(1)(1) = -i e^{i} = sin 1 - i cos 1
  CHECK(s.h1.real() == doctest::Approx(0.8414709848).epsilon(1e-10));
  CHECK(s.h1.imag() == doctest::Approx(-0.5403023059).epsilon(1e-9));
}

TEST_CASE("spherical_bessel: against the standard library at real argument") {
  for (int l : {1, 2, 5, 20, 60}) {
    for (double x : {2.0, 14.5, 47.0, 90.0}) {
      const auto s = spherical_bessel(l, cd{x, 0.0});
      CHECK(s.j.real() ==
            doctest::Approx(std::sph_bessel(l, x)).epsilon(1e-9));
      CHECK(s.y.real() ==
            doctest::Approx(std::sph_neumann(l, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("spherical_bessel: Wronskian identity at l = 50, x = 40") {
  const auto s = spherical_bessel(50, cd{40.0, 0.0});
  const cd w = s.j * s.yp - s.jp * s.y;
  CHECK(w.real() == doctest::Approx(1.0 / 1600.0).epsilon(1e-10));
  CHECK(std::abs(w.imag()) < 1e-14);
}

TEST_CASE("spherical_bessel: Wronskian property on random complex arguments") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dl(0, 120);
  std::uniform_real_distribution<double> dim(-0.3, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    const int l = dl(rng);
    std::uniform_real_distribution<double> dre(std::max(8.0, l / 2.2), 150.0);
    const cd x{dre(rng), dim(rng)};
    const auto s = spherical_bessel(l, x);
    const cd w = (s.j * s.yp - s.jp * s.y) * x * x;
    CHECK(std::abs(w - cd{1.0, 0.0}) < 1e-10);
  }
}

TEST_CASE("spherical_bessel: scaled form survives deep evanescence") {
  // l = 200 at tiny |x|: plain doubles would overflow y_l
  const auto s = spherical_bessel_scaled(200, cd{2.0, 0.0});
  CHECK(s.y.log2_abs() > 900.0);  // enormous, yet representable
  CHECK(std::isfinite(s.y.m.real()));
  // Wronskian still holds in scaled arithmetic: j y' - j' y = 1/x^2
  const ScaledC w = ssub(smul(s.j, s.yp), smul(s.jp, s.y));
  const cd wv = w.value();
  CHECK(wv.real() == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("spherical_bessel: rejects bad input") {
  CHECK_THROWS_AS((void)spherical_bessel(1, cd{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)spherical_bessel(300, cd{1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)spherical_bessel(-1, cd{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("cylinder_bessel: against the standard library at real argument") {
  for (int m : {0, 1, 3, 15, 40, 70}) {
    for (double x : {3.0, 9.0, 15.9, 16.1, 30.0, 80.0}) {
      const auto c = cylinder_bessel(m, cd{x, 0.0});
      CHECK(c.J.real() ==
            doctest::Approx(std::cyl_bessel_j(m, x)).epsilon(1e-8));
      CHECK(c.Y.real() ==
            doctest::Approx(std::cyl_neumann(m, x)).epsilon(1e-8));
      CHECK(std::abs(c.J.imag()) < 1e-12);
    }
  }
}

TEST_CASE("cylinder_bessel: Wronskian on random complex arguments") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dm(0, 90);
  std::uniform_real_distribution<double> dim(-0.2, 0.2);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = dm(rng);
    std::uniform_real_distribution<double> dre(std::max(6.0, m / 2.5), 140.0);
    const cd z{dre(rng), dim(rng)};
    const auto c = cylinder_bessel(m, z);
    // J Y' - J' Y = 2/(pi z)
    const cd w = (c.J * c.Yp - c.Jp * c.Y) * z * 3.14159265358979323846 / 2.0;
    CHECK(std::abs(w - cd{1.0, 0.0}) < 1e-9);
  }
}
