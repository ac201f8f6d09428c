#include "wgcav/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

} // namespace

const char* medium_name(MediumId id) {
  switch (id) {
    case MediumId::Core: return "core";
    case MediumId::Coating: return "coating";
    case MediumId::Exterior: return "exterior";
  }
  return "?";
}

ComplexIndex complex_index(const Medium& med, double lambda) {
  require(lambda > 0.0, "complex_index: wavelength must be positive");
  const double alpha = attenuation_coefficient(med);
  return ComplexIndex{med.n, alpha * lambda / (4.0 * constants::pi)};
}

double attenuation_coefficient(const Medium& med) {
  // dB/cm is power attenuation: alpha [1/m] = loss * 100 * ln(10) / 10.
  return med.bulk_loss_db_per_cm * 100.0 * std::log(10.0) / 10.0;
}

CrossSection::CrossSection(Shape shape, std::array<Medium, 3> media)
    : shape_(std::move(shape)), media_(std::move(media)) {
  for (const Medium& m : media_) {
    require(m.n >= 1.0, "Medium: refractive index must be >= 1");
    require(m.bulk_loss_db_per_cm >= 0.0, "Medium: bulk loss must be >= 0");
  }
  if (const auto* t = std::get_if<CoatedToroid>(&shape_)) {
    require(t->major_radius > 0.0 && t->minor_radius > 0.0,
            "CoatedToroid: radii must be positive");
    require(t->thickness >= 0.0, "CoatedToroid: thickness must be >= 0");
    require(t->major_radius > t->minor_radius,
            "CoatedToroid: major radius must exceed minor radius");
  } else if (const auto* s = std::get_if<CoatedSphere>(&shape_)) {
    require(s->core_radius > 0.0, "CoatedSphere: core radius must be positive");
    require(s->thickness >= 0.0, "CoatedSphere: thickness must be >= 0");
  } else if (const auto* c = std::get_if<Cylinder>(&shape_)) {
    require(c->radius > 0.0, "Cylinder: radius must be positive");
  }
}

double CrossSection::core_surface_distance(double rho, double z) const {
  if (const auto* t = std::get_if<CoatedToroid>(&shape_)) {
    const double dr = rho - t->major_radius;
    return std::hypot(dr, z) - t->minor_radius;
  }
  if (const auto* s = std::get_if<CoatedSphere>(&shape_)) {
    return std::hypot(rho, z) - s->core_radius;
  }
  const auto& c = std::get<Cylinder>(shape_);
  return rho - c.radius;
}

std::array<double, 2> CrossSection::layer_normal(double rho, double z) const {
  if (const auto* t = std::get_if<CoatedToroid>(&shape_)) {
    const double dr = rho - t->major_radius;
    const double d = std::hypot(dr, z);
    if (d == 0.0) return {1.0, 0.0};
    return {dr / d, z / d};
  }
  if (std::holds_alternative<CoatedSphere>(shape_)) {
    const double d = std::hypot(rho, z);
    if (d == 0.0) return {1.0, 0.0};
    return {rho / d, z / d};
  }
  return {1.0, 0.0};  // cylinder: radial
}

MediumId CrossSection::medium_at(double rho, double z) const {
  const double d = core_surface_distance(rho, z);
  if (d <= 0.0) return MediumId::Core;
  if (d <= thickness()) return MediumId::Coating;
  return MediumId::Exterior;
}

Point CrossSection::interface_point() const {
  if (is_cylinder())
    throw std::invalid_argument(
        "interface_point: no coating interface defined for a cylinder");
  return Point{rim_radius(), 0.0};
}

double CrossSection::rim_radius() const {
  if (const auto* t = std::get_if<CoatedToroid>(&shape_))
    return t->major_radius + t->minor_radius;
  if (const auto* s = std::get_if<CoatedSphere>(&shape_)) return s->core_radius;
  return std::get<Cylinder>(shape_).radius;
}

double CrossSection::outer_radius() const { return rim_radius() + thickness(); }

double CrossSection::half_height() const {
  if (const auto* t = std::get_if<CoatedToroid>(&shape_))
    return t->minor_radius + t->thickness;
  if (const auto* s = std::get_if<CoatedSphere>(&shape_))
    return s->core_radius + s->thickness;
  return 0.0;
}

double CrossSection::thickness() const {
  if (const auto* t = std::get_if<CoatedToroid>(&shape_)) return t->thickness;
  if (const auto* s = std::get_if<CoatedSphere>(&shape_)) return s->thickness;
  return 0.0;
}

std::string CrossSection::describe() const {
  std::ostringstream os;
  if (const auto* t = std::get_if<CoatedToroid>(&shape_)) {
    os << "coated_toroid R=" << t->major_radius << " R'=" << t->minor_radius
       << " t=" << t->thickness;
  } else if (const auto* s = std::get_if<CoatedSphere>(&shape_)) {
    os << "coated_sphere a=" << s->core_radius << " t=" << s->thickness;
  } else {
    os << "cylinder a=" << std::get<Cylinder>(shape_).radius;
  }
  return os.str();
}

} // namespace wgcav
