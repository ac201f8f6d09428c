#include "wgcav/bessel.hpp"

#include <stdexcept>
#include <vector>

#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

using cd = std::complex<double>;
constexpr double euler_gamma = 0.57721566490153286061;

void check_arg(std::complex<double> x, int order, int max_order) {
  if (std::abs(x) == 0.0)
    throw std::invalid_argument("bessel: argument must be nonzero");
  if (order < 0 || order > max_order)
    throw std::invalid_argument("bessel: order out of supported range");
}

// Pulls the binary exponent out of (a, b) when they grow or shrink too far.
void renorm_pair(cd& a, cd& b, double& e2) {
  const double mag = std::max(std::abs(a), std::abs(b));
  if (mag == 0.0) return;
  const int k = static_cast<int>(std::floor(std::log2(mag)));
  if (k > 400 || k < -400) {
    const double s = std::exp2(static_cast<double>(-k));
    a *= s;
    b *= s;
    e2 += k;
  }
}

} // namespace

SphericalSetScaled spherical_bessel_scaled(int l, cd x) {
  check_arg(x, l, spherical_l_max);

  const cd sinx = std::sin(x);
  const cd cosx = std::cos(x);
  const cd j0 = sinx / x;
  const cd j1 = sinx / (x * x) - cosx / x;
  const cd y0 = -cosx / x;
  const cd y1 = -cosx / (x * x) - sinx / x;

  SphericalSetScaled out;

  // j: downward recurrence f_{n-1} = (2n+1)/x f_n - f_{n+1}, normalized
  // against the closed forms at order 0/1 (whichever is larger).
  {
    // Start far enough above the turning point that seed contamination
    // decays below 1e-13 even for small l at large |x|.
    const int l_start = l + 20 + static_cast<int>(std::ceil(1.5 * std::abs(x)));
    cd fn{0.0, 0.0}, fnm1{1e-280, 0.0};
    double e2 = 0.0;
    cd at_l{0.0, 0.0}, at_lm1{0.0, 0.0};
    double e_l = 0.0, e_lm1 = 0.0;
    cd f0{0.0, 0.0}, f1{0.0, 0.0};
    double e0 = 0.0, e1 = 0.0;
    for (int n = l_start; n >= 1; --n) {
      // fnm1 currently holds f_n; fn holds f_{n+1}
      const cd fprev = (2.0 * n + 1.0) / x * fnm1 - fn;
      fn = fnm1;
      fnm1 = fprev;
      renorm_pair(fnm1, fn, e2);
      if (n - 1 == l) { at_l = fnm1; e_l = e2; }
      if (n - 1 == l - 1) { at_lm1 = fnm1; e_lm1 = e2; }
      if (n - 1 == 1) { f1 = fnm1; e1 = e2; }
      if (n - 1 == 0) { f0 = fnm1; e0 = e2; }
    }
    // Normalize against whichever closed form is larger (j_0 can sit at a zero).
    ScaledC scale = std::abs(j0) >= std::abs(j1) ? ScaledC{j0 / f0, -e0}
                                                 : ScaledC{j1 / f1, -e1};
    scale.normalize();
    out.j = smul(ScaledC{at_l, e_l}, scale);
    const ScaledC jlm1 = l >= 1 ? smul(ScaledC{at_lm1, e_lm1}, scale)
                                : ScaledC{cosx / x, 0.0};  // j_{-1} = cos x / x
    // j_l' = j_{l-1} - (l+1)/x j_l
    out.jp = ssub(jlm1, smul(out.j, (l + 1.0) / x));
  }

  // y: upward recurrence (dominant solution, stable).
  {
    cd ym1 = y0, yn = y1;
    double e2 = 0.0;
    if (l == 0) {
      out.y = ScaledC{y0, 0.0};
      // y_0' = y_{-1} - (1/x) y_0 with y_{-1} = sin x / x
      out.yp = ssub(ScaledC{sinx / x, 0.0}, smul(out.y, 1.0 / x));
      return out;
    }
    for (int n = 1; n < l; ++n) {
      const cd ynext = (2.0 * n + 1.0) / x * yn - ym1;
      ym1 = yn;
      yn = ynext;
      renorm_pair(ym1, yn, e2);
    }
    out.y = ScaledC{yn, e2}.normalize();
    const ScaledC ylm1 = ScaledC{ym1, e2}.normalize();
    out.yp = ssub(ylm1, smul(out.y, (l + 1.0) / x));
  }
  return out;
}

SphericalSet spherical_bessel(int l, cd x) {
  const SphericalSetScaled s = spherical_bessel_scaled(l, x);
  SphericalSet out;
  out.j = s.j.value();
  out.jp = s.jp.value();
  out.y = s.y.value();
  out.yp = s.yp.value();
  out.h1 = out.j + cd{0.0, 1.0} * out.y;
  out.h1p = out.jp + cd{0.0, 1.0} * out.yp;
  return out;
}

namespace {

// Power series for J_0, J_1, Y_0, Y_1 (used for |z| < 16).
void cyl_low_order_series(cd z, cd& J0, cd& J1, cd& Y0, cd& Y1) {
  const cd q = -0.25 * z * z;  // (-z^2/4)
  // J_0 and Y_0 sum
  cd term{1.0, 0.0};
  cd j0 = term;
  cd y0sum{0.0, 0.0};
  double Hk = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / static_cast<double>(k * k);
    j0 += term;
    Hk += 1.0 / k;
    y0sum += -term * Hk;  // (-1)^{k+1} H_k (z^2/4)^k / (k!)^2 = -H_k * term
    if (std::abs(term) < 1e-18 * std::abs(j0) && k > 4) break;
  }
  // J_1 and Y_1 sums
  cd term1{1.0, 0.0};
  cd j1sum = term1;
  cd y1sum{0.0, 0.0};
  double Hk1 = 0.0, Hkp1 = 1.0;
  y1sum = (Hk1 + Hkp1 - 2.0 * euler_gamma) * term1;
  for (int k = 1; k < 200; ++k) {
    term1 *= q / static_cast<double>(k * (k + 1));
    j1sum += term1;
    Hk1 += 1.0 / k;
    Hkp1 += 1.0 / (k + 1);
    y1sum += (Hk1 + Hkp1 - 2.0 * euler_gamma) * term1;
    if (std::abs(term1) < 1e-18 * std::abs(j1sum) && k > 4) break;
  }
  J0 = j0;
  J1 = 0.5 * z * j1sum;
  const cd lg = std::log(0.5 * z);
  const double inv_pi = 1.0 / constants::pi;
  Y0 = 2.0 * inv_pi * ((lg + euler_gamma) * J0 + y0sum);
  Y1 = 2.0 * inv_pi * lg * J1 - 2.0 * inv_pi / z - inv_pi * 0.5 * z * y1sum;
}

// Hankel asymptotic expansion for nu = 0, 1 at |z| >= 16.
cd hankel1_asymptotic(int nu, cd z) {
  const double mu = 4.0 * nu * nu;
  cd sum{1.0, 0.0};
  cd term{1.0, 0.0};
  double prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    term *= cd{0.0, 1.0} * num / (8.0 * static_cast<double>(k) * z);
    const double mag = std::abs(term);
    if (mag > prev) break;  // asymptotic series: stop at smallest term
    sum += term;
    prev = mag;
    if (mag < 1e-18) break;
  }
  const cd chi = z - (0.5 * nu + 0.25) * constants::pi;
  return std::sqrt(2.0 / (constants::pi * z)) * std::exp(cd{0.0, 1.0} * chi) * sum;
}

} // namespace

CylinderSet cylinder_bessel(int m, cd z) {
  check_arg(z, m, cylinder_m_max);

  // J by Miller's algorithm: downward recurrence plus the normalization
  // J_0 + 2 J_2 + 2 J_4 + ... = 1.
  const int m_start = m + 22 + static_cast<int>(std::ceil(1.5 * std::abs(z)));
  cd fnp1{0.0, 0.0}, fn{1e-280, 0.0};
  double e2 = 0.0;
  cd norm{0.0, 0.0};
  double e_norm = 0.0;
  cd at_m{0.0, 0.0}, at_mm1{0.0, 0.0}, at_0{0.0, 0.0}, at_1{0.0, 0.0};
  double e_m = 0.0, e_mm1 = 0.0, e_0 = 0.0, e_1 = 0.0;
  for (int n = m_start; n >= 1; --n) {
    cd fprev = (2.0 * n) / z * fn - fnp1;
    fnp1 = fn;
    fn = fprev;
    {
      // keep the normalization accumulator on the same scale
      double mag = std::max(std::abs(fn), std::abs(fnp1));
      if (mag != 0.0) {
        int k = static_cast<int>(std::floor(std::log2(mag)));
        if (k > 400 || k < -400) {
          const double s = std::exp2(static_cast<double>(-k));
          fn *= s;
          fnp1 *= s;
          e2 += k;
        }
      }
    }
    const int idx = n - 1;
    if (idx == m) { at_m = fn; e_m = e2; }
    if (idx == m - 1) { at_mm1 = fn; e_mm1 = e2; }
    if (idx == 0) { at_0 = fn; e_0 = e2; }
    if (idx == 1) { at_1 = fn; e_1 = e2; }
    if (idx >= 2 && idx % 2 == 0) {
      // norm stored at scale e_norm; bring to current scale e2
      norm = norm * std::exp2(e_norm - e2) + 2.0 * fn;
      e_norm = e2;
    }
  }
  norm = norm * std::exp2(e_norm - e2) + at_0;  // J_0 + 2 sum_{even}
  e_norm = e2;

  const ScaledC scale = ScaledC{1.0 / norm, -e_norm}.normalize();
  const ScaledC Jm = smul(ScaledC{at_m, e_m}, scale);
  const ScaledC J0s = smul(ScaledC{at_0, e_0}, scale);
  const ScaledC J1s = smul(ScaledC{at_1, e_1}, scale);
  ScaledC Jmm1 = m >= 1 ? smul(ScaledC{at_mm1, e_mm1}, scale)
                        : smul(J1s, -1.0);  // J_{-1} = -J_1

  // Y_0, Y_1 from series or asymptotics, then upward recurrence.
  cd Y0, Y1;
  const cd J0v = J0s.value();
  const cd J1v = J1s.value();
  if (std::abs(z) < 16.0) {
    cd j0_, j1_;
    cyl_low_order_series(z, j0_, j1_, Y0, Y1);
  } else {
    const cd h0 = hankel1_asymptotic(0, z);
    const cd h1 = hankel1_asymptotic(1, z);
    Y0 = (h0 - J0v) / cd{0.0, 1.0};
    Y1 = (h1 - J1v) / cd{0.0, 1.0};
  }
  cd ym1 = Y0, yn = Y1;
  double ey = 0.0;
  if (m == 0) {
    yn = Y0;
    ym1 = -Y1;  // Y_{-1} = -Y_1
  } else {
    for (int n = 1; n < m; ++n) {
      const cd ynext = (2.0 * n) / z * yn - ym1;
      ym1 = yn;
      yn = ynext;
      renorm_pair(ym1, yn, ey);
    }
  }
  const ScaledC Ym = ScaledC{yn, ey}.normalize();
  const ScaledC Ymm1 = ScaledC{ym1, ey}.normalize();

  CylinderSet out;
  out.J = Jm.value();
  out.Y = Ym.value();
  const double mo = static_cast<double>(m);
  out.Jp = ssub(Jmm1, smul(Jm, mo / z)).value();
  out.Yp = ssub(Ymm1, smul(Ym, mo / z)).value();
  out.H1 = out.J + cd{0.0, 1.0} * out.Y;
  out.H1p = out.Jp + cd{0.0, 1.0} * out.Yp;
  return out;
}

} // namespace wgcav
