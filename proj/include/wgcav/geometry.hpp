#pragma once

#include <array>
#include <complex>
#include <string>
#include <variant>

namespace wgcav {

/// Region label for a point of the (rho, z) cross-section.
enum class MediumId { Core = 0, Coating = 1, Exterior = 2 };

inline constexpr std::array<MediumId, 3> all_medium_ids = {
    MediumId::Core, MediumId::Coating, MediumId::Exterior};

const char* medium_name(MediumId id);

/// A named optical material: real index plus bulk power loss in dB/cm.
struct Medium {
  std::string name;
  double n = 1.0;
  double bulk_loss_db_per_cm = 0.0;
};

/// Complex refractive index at a wavelength, im >= 0 under e^{-i w t}.
struct ComplexIndex {
  double re = 1.0;
  double im = 0.0;

  std::complex<double> value() const { return {re, im}; }
  std::complex<double> eps() const { return value() * value(); }
};

/// dB/cm -> Im(n): alpha [1/m] = loss * 100 * ln(10)/10, Im(n) = alpha*lambda/(4 pi).
ComplexIndex complex_index(const Medium& med, double lambda);

/// Power attenuation coefficient alpha [1/m] for the medium's bulk loss.
double attenuation_coefficient(const Medium& med);

struct Point {
  double rho = 0.0;
  double z = 0.0;
};

// Shape variants. The toroid's major radius R is the radius of the tube
// centerline circle, so the outer silica rim sits at rho = R + R_minor.
struct CoatedToroid {
  double major_radius;   // R, tube centerline circle (m)
  double minor_radius;   // R' (m)
  double thickness;      // t >= 0 (m)
};

struct CoatedSphere {
  double core_radius;  // a (m)
  double thickness;    // t >= 0 (m)
};

struct Cylinder {
  double radius;  // a (m), infinite along z
};

/// Axisymmetric cavity cross-section in the (rho, z) half-plane together
/// with the three media (core, coating, exterior).
class CrossSection {
 public:
  using Shape = std::variant<CoatedToroid, CoatedSphere, Cylinder>;

  CrossSection(Shape shape, std::array<Medium, 3> media);

  const Shape& shape() const { return shape_; }
  const Medium& medium(MediumId id) const { return media_[static_cast<int>(id)]; }
  const std::array<Medium, 3>& media() const { return media_; }

  /// Which medium occupies (rho, z); boundary points belong to the inner region.
  MediumId medium_at(double rho, double z) const;

  /// Signed distance from the core outer surface: < 0 inside the core,
  /// in (0, t] inside the coating, > t outside.
  double core_surface_distance(double rho, double z) const;

  /// Unit outward normal of the layer stack at (rho, z), as (n_rho, n_z).
  std::array<double, 2> layer_normal(double rho, double z) const;

  /// Equatorial outer-core point (rho = R + R', z = 0) resp. (a, 0).
  /// Rejects Cylinder: no coating interface is defined there.
  Point interface_point() const;

  /// Radius of the outer core surface at the equator (R + R' or a).
  double rim_radius() const;
  /// rim_radius() + t.
  double outer_radius() const;
  /// Cavity body half-height in z (R' + t or a + t); 0 for the z-invariant cylinder.
  double half_height() const;
  double thickness() const;

  bool is_toroid() const { return std::holds_alternative<CoatedToroid>(shape_); }
  bool is_sphere() const { return std::holds_alternative<CoatedSphere>(shape_); }
  bool is_cylinder() const { return std::holds_alternative<Cylinder>(shape_); }

  std::string describe() const;

 private:
  Shape shape_;
  std::array<Medium, 3> media_;  // core, coating, exterior
};

} // namespace wgcav
