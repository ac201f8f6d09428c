#pragma once

#include <cmath>

#include "wgcav/geometry.hpp"

namespace wgtest {

inline const wgcav::Medium silica{"silica", 1.4564, 1e-5};
inline const wgcav::Medium su8{"SU-8", 1.59, 0.01};
inline const wgcav::Medium air{"air", 1.0, 0.0};

// First-radial-order WGM order estimate: n k a = nu + 1.8557 nu^{1/3}.
inline int fundamental_order(double a, double n, double lambda) {
  const double nka = n * 2.0 * 3.14159265358979323846 * a / lambda;
  double nu = nka;
  for (int it = 0; it < 8; ++it) nu = nka - 1.8557 * std::cbrt(nu);
  return static_cast<int>(std::lround(nu - 0.5));
}

} // namespace wgtest
