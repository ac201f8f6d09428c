#include "doctest.h"

#include <random>

#include "wgcav/geometry.hpp"

using namespace wgcav;

namespace {

const Medium silica{"silica", 1.4564, 1e-5};
const Medium su8{"SU-8", 1.59, 0.01};
const Medium air{"air", 1.0, 0.0};

CrossSection toroid(double R, double Rm, double t) {
  return CrossSection(CoatedToroid{R, Rm, t}, {silica, su8, air});
}

} // namespace

TEST_CASE("medium_at: coated toroid region membership") {
  const auto cs = toroid(4e-6, 1e-6, 150e-9);
  CHECK(cs.medium_at(4e-6, 0.0) == MediumId::Core);          // tube centerline
  CHECK(cs.medium_at(5e-6 + 75e-9, 0.0) == MediumId::Coating);  // mid-layer depth
  CHECK(cs.medium_at(6e-6, 0.0) == MediumId::Exterior);
  // boundary points (exact equality) belong to the inner region
  const CrossSection sph(CoatedSphere{5e-6, 150e-9}, {silica, su8, air});
  CHECK(sph.medium_at(5e-6, 0.0) == MediumId::Core);
}

TEST_CASE("medium_at: sphere and cylinder") {
  const CrossSection sph(CoatedSphere{5e-6, 100e-9}, {silica, su8, air});
  CHECK(sph.medium_at(3e-6, 3e-6) == MediumId::Core);  // r = 4.24um < 5um
  CHECK(sph.medium_at(0.0, 5.05e-6) == MediumId::Coating);
  CHECK(sph.medium_at(5.2e-6, 0.0) == MediumId::Exterior);
  const CrossSection cyl(Cylinder{3e-6}, {silica, silica, air});
  CHECK(cyl.medium_at(2.9e-6, 1.0) == MediumId::Core);  // z-invariant
  CHECK(cyl.medium_at(3.1e-6, -5.0) == MediumId::Exterior);
}

TEST_CASE("medium_at: partition property on random sample points") {
  const auto cs = toroid(4e-6, 1e-6, 150e-9);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ur(0.0, 8e-6), uz(-3e-6, 3e-6);
  for (int k = 0; k < 2000; ++k) {
    const MediumId id = cs.medium_at(ur(rng), uz(rng));
    const int v = static_cast<int>(id);
    CHECK(v >= 0);
    CHECK(v <= 2);
  }
}

TEST_CASE("monotone shrink: thinner coating region is inside the thicker one") {
  const auto thin = toroid(4e-6, 1e-6, 50e-9);
  const auto thick = toroid(4e-6, 1e-6, 200e-9);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ur(2.5e-6, 6e-6), uz(-2e-6, 2e-6);
  for (int k = 0; k < 2000; ++k) {
    const double rho = ur(rng), z = uz(rng);
    if (thin.medium_at(rho, z) == MediumId::Coating) {
      const MediumId in_thick = thick.medium_at(rho, z);
      CHECK(in_thick != MediumId::Exterior);
    }
  }
}

TEST_CASE("complex_index: dB/cm conversion") {
  const ComplexIndex c1 = complex_index(su8, 637e-9);
  CHECK(c1.re == doctest::Approx(1.59));
  CHECK(c1.im == doctest::Approx(1.167e-8).epsilon(1e-3));
  const ComplexIndex c2 = complex_index(silica, 637e-9);
  CHECK(c2.im == doctest::Approx(1.167e-11).epsilon(1e-3));
  const ComplexIndex c3 = complex_index(air, 1.55e-6);
  CHECK(c3.im == 0.0);
}

TEST_CASE("complex_index is homogeneous in loss") {
  Medium doubled = su8;
  doubled.bulk_loss_db_per_cm *= 2.0;
  const double im1 = complex_index(su8, 637e-9).im;
  const double im2 = complex_index(doubled, 637e-9).im;
  CHECK(im2 == doctest::Approx(2.0 * im1).epsilon(1e-14));
}

TEST_CASE("interface_point") {
  CHECK(toroid(4e-6, 1e-6, 100e-9).interface_point().rho == doctest::Approx(5e-6));
  CHECK(toroid(2e-6, 1e-6, 150e-9).interface_point().rho == doctest::Approx(3e-6));
  const CrossSection sph(CoatedSphere{5e-6, 100e-9}, {silica, su8, air});
  CHECK(sph.interface_point().rho == doctest::Approx(5e-6));
  CHECK(sph.interface_point().z == 0.0);
  const CrossSection cyl(Cylinder{3e-6}, {silica, su8, air});
  CHECK_THROWS_AS((void)cyl.interface_point(), std::invalid_argument);
}

TEST_CASE("constructor rejects bad parameters") {
  CHECK_THROWS(toroid(1e-6, 2e-6, 0.0));  // R <= R'
  CHECK_THROWS(CrossSection(CoatedSphere{-1e-6, 0.0}, {silica, su8, air}));
  CHECK_THROWS(CrossSection(Cylinder{1e-6}, {Medium{"bad", 0.5, 0.0}, su8, air}));
  CHECK_THROWS(CrossSection(Cylinder{1e-6}, {Medium{"bad", 1.5, -1.0}, su8, air}));
}
