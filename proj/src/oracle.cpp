#include "wgcav/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgcav/bessel.hpp"
#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

using cd = std::complex<double>;

// Riccati-Bessel values psi = x j, chi = -x y, xi = x h1 and r-derivatives
// d/dr f(n k r) = n k f'(x), in scaled form.
struct RadialBasis {
  ScaledC psi, dpsi;  // regular
  ScaledC chi, dchi;  // irregular
  ScaledC xi, dxi;    // outgoing
};

RadialBasis radial_basis(int l, cd n, cd k, double r) {
  const cd x = n * k * r;
  const SphericalSetScaled s = spherical_bessel_scaled(l, x);
  const cd nk = n * k;
  const ScaledC xj = smul(s.j, x);
  const ScaledC xy = smul(s.y, x);
  const ScaledC psi_p = sadd(s.j, smul(s.jp, x));  // j + x j'
  const ScaledC eta_p = sadd(s.y, smul(s.yp, x));  // y + x y'
  RadialBasis b;
  b.psi = xj;
  b.dpsi = smul(psi_p, nk);
  b.chi = smul(xy, cd{-1.0, 0.0});
  b.dchi = smul(eta_p, -nk);
  b.xi = sadd(xj, smul(xy, cd{0.0, 1.0}));
  b.dxi = smul(sadd(psi_p, smul(eta_p, cd{0.0, 1.0})), nk);
  return b;
}

ScaledC match_weight(const ScaledC& deriv, cd n, ExactPolarization pol) {
  if (pol == ExactPolarization::TM) return smul(deriv, 1.0 / (n * n));
  return deriv;
}

} // namespace

LayeredRadialProblem LayeredRadialProblem::from_sphere(const CrossSection& cs,
                                                       ExactPolarization pol,
                                                       int l,
                                                       double lambda_for_loss,
                                                       bool include_absorption) {
  if (!cs.is_sphere())
    throw std::invalid_argument("LayeredRadialProblem::from_sphere: sphere geometry required");
  LayeredRadialProblem prob;
  prob.polarization = pol;
  prob.l = l;
  auto idx = [&](MediumId id) -> cd {
    const ComplexIndex ci = complex_index(cs.medium(id), lambda_for_loss);
    return include_absorption ? ci.value() : cd{ci.re, 0.0};
  };
  const double a = cs.rim_radius();
  const double t = cs.thickness();
  if (t > 0.0) {
    prob.radii = {a, a + t};
    prob.indices = {idx(MediumId::Core), idx(MediumId::Coating), idx(MediumId::Exterior)};
  } else {
    prob.radii = {a};
    prob.indices = {idx(MediumId::Core), idx(MediumId::Exterior)};
  }
  return prob;
}

cd characteristic(const LayeredRadialProblem& prob, cd omega) {
  if (std::abs(omega) == 0.0)
    throw std::invalid_argument("characteristic: omega must be nonzero");
  if (prob.indices.size() != prob.radii.size() + 1)
    throw std::invalid_argument("characteristic: indices must be radii+1");
  for (size_t i = 1; i < prob.radii.size(); ++i)
    if (!(prob.radii[i] >= prob.radii[i - 1]))
      throw std::invalid_argument("characteristic: radii must be increasing");

  const cd k = omega / constants::speed_of_light;
  const int l = prob.l;
  const ExactPolarization pol = prob.polarization;

  // Regular solution in the core evaluated at the first interface.
  const RadialBasis core = radial_basis(l, prob.indices[0], k, prob.radii[0]);
  ScaledC u = core.psi;
  ScaledC w = match_weight(core.dpsi, prob.indices[0], pol);

  // Propagate through intermediate layers with the adjugate transfer matrix
  // (the determinant factor cancels in the normalized residual).
  for (size_t layer = 1; layer + 1 < prob.indices.size(); ++layer) {
    const cd n = prob.indices[layer];
    const RadialBasis lo = radial_basis(l, n, k, prob.radii[layer - 1]);
    const RadialBasis hi = radial_basis(l, n, k, prob.radii[layer]);
    const ScaledC wp_lo = match_weight(lo.dpsi, n, pol);
    const ScaledC wc_lo = match_weight(lo.dchi, n, pol);
    const ScaledC wp_hi = match_weight(hi.dpsi, n, pol);
    const ScaledC wc_hi = match_weight(hi.dchi, n, pol);
    // adj([psi chi; wp wc]) (u, w)
    const ScaledC alpha = ssub(smul(wc_lo, u), smul(lo.chi, w));
    const ScaledC beta = ssub(smul(lo.psi, w), smul(wp_lo, u));
    u = sadd(smul(hi.psi, alpha), smul(hi.chi, beta));
    w = sadd(smul(wp_hi, alpha), smul(wc_hi, beta));
  }

  // Outgoing wave in the exterior at the outermost interface.
  const cd n_out = prob.indices.back();
  const RadialBasis ext = radial_basis(l, n_out, k, prob.radii.back());
  const ScaledC w_xi = match_weight(ext.dxi, n_out, pol);
  const ScaledC p1 = smul(u, w_xi);
  const ScaledC p2 = smul(w, ext.xi);
  if (std::max(p1.log2_abs(), p2.log2_abs()) < -1e290) return {0.0, 0.0};
  // normalize by the largest entry (complex), cancelling transfer determinants
  const ScaledC& big = p1.log2_abs() >= p2.log2_abs() ? p1 : p2;
  const cd v1 = p1.m * std::exp2(p1.e2 - big.e2) / big.m;
  const cd v2 = p2.m * std::exp2(p2.e2 - big.e2) / big.m;
  return v1 - v2;
}

cd cylinder_characteristic(const CylinderProblem& prob, cd omega) {
  if (std::abs(omega) == 0.0)
    throw std::invalid_argument("cylinder_characteristic: omega must be nonzero");
  const cd k = omega / constants::speed_of_light;
  const cd xi_in = prob.n_in * k * prob.radius;
  const cd xi_out = prob.n_out * k * prob.radius;
  const CylinderSet in = cylinder_bessel(prob.m, xi_in);
  const CylinderSet out = cylinder_bessel(prob.m, xi_out);
  cd w_in, w_out;
  if (prob.polarization == CylinderPolarization::TMz) {
    w_in = prob.n_in * k * in.Jp;
    w_out = prob.n_out * k * out.H1p;
  } else {
    w_in = k / prob.n_in * in.Jp;
    w_out = k / prob.n_out * out.H1p;
  }
  const cd p1 = in.J * w_out;
  const cd p2 = w_in * out.H1;
  const cd big = std::abs(p1) >= std::abs(p2) ? p1 : p2;
  if (std::abs(big) == 0.0) return {0.0, 0.0};
  return (p1 - p2) / big;
}

cd refine_complex_root(const std::function<cd(cd)>& f, cd x0, cd x1,
                       double rel_tol, int max_iter) {
  cd f0 = f(x0);
  cd f1 = f(x1);
  for (int it = 0; it < max_iter; ++it) {
    const cd denom = f1 - f0;
    if (std::abs(denom) == 0.0) break;
    const cd x2 = x1 - f1 * (x1 - x0) / denom;
    if (std::abs(x2 - x1) > 0.05 * std::abs(x1))
      throw std::runtime_error("refine_complex_root: iteration left the bracket");
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f(x1);
    if (std::abs(x1 - x0) <= rel_tol * std::abs(x1)) return x1;
  }
  throw std::runtime_error("refine_complex_root: no convergence");
}

namespace {

ResonanceResult scan_and_refine(const std::function<cd(cd)>& f,
                                std::pair<double, double> lambda_bracket,
                                int scan_points) {
  const double la = lambda_bracket.first, lb = lambda_bracket.second;
  if (!(la > 0.0 && lb > la))
    throw std::invalid_argument("find_resonance: empty wavelength bracket");
  if (scan_points < 8) scan_points = 8;
  const double w_hi = 2.0 * constants::pi * constants::speed_of_light / la;
  const double w_lo = 2.0 * constants::pi * constants::speed_of_light / lb;

  int best = -1;
  double best_mag = 1e300;
  std::vector<double> mags(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    const double w = w_lo + (w_hi - w_lo) * i / (scan_points - 1.0);
    mags[i] = std::abs(f(cd{w, 0.0}));
    if (mags[i] < best_mag) {
      best_mag = mags[i];
      best = i;
    }
  }
  if (best <= 0 || best >= scan_points - 1)
    throw std::runtime_error("find_resonance: no interior |residual| minimum in bracket");

  const double w0 = w_lo + (w_hi - w_lo) * best / (scan_points - 1.0);
  const double dw = (w_hi - w_lo) / (scan_points - 1.0);
  const cd root = refine_complex_root(f, cd{w0, 0.0}, cd{w0 + 0.3 * dw, 0.0});

  ResonanceResult res;
  res.omega = root;
  res.lambda_res = 2.0 * constants::pi * constants::speed_of_light / root.real();
  const double im = root.imag();
  res.q_rad = im < 0.0 ? root.real() / (2.0 * std::abs(im))
                       : std::numeric_limits<double>::infinity();
  return res;
}

} // namespace

ResonanceResult find_resonance(const LayeredRadialProblem& prob, int l,
                               std::pair<double, double> lambda_bracket,
                               int scan_points) {
  LayeredRadialProblem p = prob;
  p.l = l;
  return scan_and_refine([&p](cd w) { return characteristic(p, w); },
                         lambda_bracket, scan_points);
}

ResonanceResult find_cylinder_resonance(const CylinderProblem& prob,
                                        std::pair<double, double> lambda_bracket,
                                        int scan_points) {
  return scan_and_refine(
      [&prob](cd w) { return cylinder_characteristic(prob, w); },
      lambda_bracket, scan_points);
}

} // namespace wgcav
