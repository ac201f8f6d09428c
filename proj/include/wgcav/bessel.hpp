#pragma once

#include <cmath>
#include <complex>

namespace wgcav {

/// Complex number held as mantissa * 2^e2 so that deeply evanescent Bessel
/// magnitudes survive without overflow. Mantissa kept within ~2^±500.
struct ScaledC {
  std::complex<double> m{0.0, 0.0};
  double e2 = 0.0;

  std::complex<double> value() const { return m * std::exp2(e2); }
  double log2_abs() const {
    const double a = std::abs(m);
    return a == 0.0 ? -1.0e300 : std::log2(a) + e2;
  }
  ScaledC& normalize() {
    const double a = std::abs(m);
    if (a == 0.0 || std::isinf(a) || std::isnan(a)) return *this;
    const int k = static_cast<int>(std::floor(std::log2(a)));
    if (k > 200 || k < -200) {
      m = std::complex<double>(std::ldexp(m.real(), -k), std::ldexp(m.imag(), -k));
      e2 += k;
    }
    return *this;
  }
};

inline ScaledC smul(const ScaledC& a, const ScaledC& b) {
  ScaledC r{a.m * b.m, a.e2 + b.e2};
  return r.normalize();
}
inline ScaledC smul(const ScaledC& a, std::complex<double> c) {
  ScaledC r{a.m * c, a.e2};
  return r.normalize();
}
inline ScaledC ssub(const ScaledC& a, const ScaledC& b) {
  const double e = std::max(a.e2, b.e2);
  ScaledC r{a.m * std::exp2(a.e2 - e) - b.m * std::exp2(b.e2 - e), e};
  return r.normalize();
}
inline ScaledC sadd(const ScaledC& a, const ScaledC& b) {
  const double e = std::max(a.e2, b.e2);
  ScaledC r{a.m * std::exp2(a.e2 - e) + b.m * std::exp2(b.e2 - e), e};
  return r.normalize();
}

/// Spherical Bessel/Hankel values and derivatives at one order.
struct SphericalSet {
  std::complex<double> j, jp;    // j_l, j_l'
  std::complex<double> y, yp;    // y_l, y_l'
  std::complex<double> h1, h1p;  // h_l^(1) = j + i y and derivative
};

struct SphericalSetScaled {
  ScaledC j, jp, y, yp;
};

/// j_l by downward recurrence with closed-form normalization, y_l upward;
/// relative accuracy ~1e-12 in the working range (see tests). Orders up to
/// l_max = 200; |x| must be > 0.
SphericalSet spherical_bessel(int l, std::complex<double> x);

/// Overflow-safe variant for transfer-matrix work at deep evanescence.
SphericalSetScaled spherical_bessel_scaled(int l, std::complex<double> x);

/// Cylindrical Bessel/Hankel values and derivatives at one order.
struct CylinderSet {
  std::complex<double> J, Jp;
  std::complex<double> Y, Yp;
  std::complex<double> H1, H1p;
};

/// J_m by Miller's downward recurrence, Y_m upward from series (|z| < 16)
/// or Hankel asymptotics (|z| >= 16).
CylinderSet cylinder_bessel(int m, std::complex<double> z);

inline constexpr int spherical_l_max = 200;
inline constexpr int cylinder_m_max = 250;

} // namespace wgcav
