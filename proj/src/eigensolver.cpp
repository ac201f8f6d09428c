#include "wgcav/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <random>
#include <set>

#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

using cd = std::complex<double>;
constexpr double c0 = constants::speed_of_light;
constexpr double two_pi = 2.0 * constants::pi;

VectorC random_start(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  VectorC v(n);
  for (int i = 0; i < n; ++i) v[i] = cd{nd(rng), nd(rng)};
  v /= v.norm();
  return v;
}

SparseC shifted_matrix(const OperatorPair& op, cd sigma) {
  SparseC D(op.layout.total(), op.layout.total());
  std::vector<Eigen::Triplet<cd>> tr;
  tr.reserve(op.layout.total());
  for (int k = 0; k < op.layout.total(); ++k)
    tr.emplace_back(k, k, sigma * op.B[k]);
  D.setFromTriplets(tr.begin(), tr.end());
  SparseC S = op.A - D;
  S.makeCompressed();
  return S;
}

double pair_residual(const OperatorPair& op, cd lambda, const VectorC& v,
                     VectorC* av_out = nullptr) {
  const VectorC av = op.A * v;
  const VectorC bv = op.B.cwiseProduct(v);
  const double scale = av.norm() + std::abs(lambda) * bv.norm();
  if (av_out) *av_out = av;
  return (av - lambda * bv).norm() / std::max(scale, 1e-300);
}

struct RitzPair {
  cd lambda;
  VectorC vec;
  double residual;
};

// Shift-invert Arnoldi on T = (A - sigma B)^{-1} B with modified Gram-Schmidt
// and one re-orthogonalization pass.
std::vector<RitzPair> arnoldi_shift_invert(const OperatorPair& op, cd sigma,
                                           int krylov_dim, int count,
                                           double tol, std::uint64_t seed,
                                           bool verbose) {
  const int n = op.layout.total();
  const int k_max = std::min(krylov_dim, n - 1);

  Eigen::SparseLU<SparseC> lu;
  {
    const SparseC S = shifted_matrix(op, sigma);
    lu.compute(S);
    if (lu.info() != Eigen::Success)
      throw SolverError("solve_near: sparse factorization of (A - sigma B) failed");
  }

  std::vector<VectorC> V;
  V.reserve(k_max + 1);
  V.push_back(random_start(n, seed));
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(k_max + 1, k_max);

  int k_done = 0;
  double op_scale = 0.0;  // |T| scale: breakdown must be judged relative to it
  for (int k = 0; k < k_max; ++k) {
    VectorC w = lu.solve(op.B.cwiseProduct(V[k]));
    op_scale = std::max(op_scale, w.norm());
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= k; ++i) {
        const cd h = V[i].dot(w);  // conjugated inner product
        H(i, k) += h;
        w -= h * V[i];
      }
    }
    const double hk = w.norm();
    H(k + 1, k) = hk;
    k_done = k + 1;
    if (hk < 1e-13 * op_scale) break;  // invariant subspace
    V.push_back(w / hk);
  }

  const Eigen::MatrixXcd Hk = H.topLeftCorner(k_done, k_done);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(Hk);
  if (ces.info() != Eigen::Success)
    throw SolverError("solve_near: Hessenberg eigendecomposition failed");

  struct Cand {
    cd theta;
    int idx;
    double est;
  };
  std::vector<Cand> cands;
  const double h_last = std::abs(H(k_done, k_done - 1));
  for (int i = 0; i < k_done; ++i) {
    const cd theta = ces.eigenvalues()[i];
    if (std::abs(theta) < 1e-290) continue;
    const double est =
        h_last * std::abs(ces.eigenvectors()(k_done - 1, i)) / std::abs(theta);
    cands.push_back({theta, i, est});
  }
  // nearest to sigma first: largest |theta|
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return std::abs(a.theta) > std::abs(b.theta); });
  if (verbose) {
    std::cerr << "  arnoldi k=" << k_done << " h_last=" << h_last << "\n";
    for (size_t q = 0; q < std::min<size_t>(8, cands.size()); ++q)
      std::cerr << "  cand theta=" << cands[q].theta
                << " lambda=" << sigma + 1.0 / cands[q].theta
                << " est=" << cands[q].est << "\n";
  }

  std::vector<RitzPair> out;
  for (const Cand& c : cands) {
    if (static_cast<int>(out.size()) >= count) break;
    if (c.est > 1e3 * tol) continue;  // hopeless, skip the expensive check
    VectorC v = VectorC::Zero(n);
    for (int i = 0; i < k_done; ++i) v += ces.eigenvectors()(i, c.idx) * V[i];
    v.normalize();
    const cd lambda = sigma + 1.0 / c.theta;
    const double res = pair_residual(op, lambda, v);
    if (verbose)
      std::cerr << "  ritz lambda=" << lambda << " est=" << c.est
                << " res=" << res << "\n";
    if (res <= tol) out.push_back({lambda, std::move(v), res});
  }
  return out;
}

int count_sign_changes(const std::vector<double>& vals, double floor_mag) {
  int changes = 0;
  int prev_sign = 0;
  for (double v : vals) {
    if (std::abs(v) < floor_mag) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (prev_sign != 0 && s != prev_sign) ++changes;
    prev_sign = s;
  }
  return changes;
}

} // namespace

const char* polarization_name(Polarization pol) {
  return pol == Polarization::QuasiTE ? "TE" : "TM";
}

double quality_factor(std::complex<double> omega) {
  if (omega.imag() >= 0.0) return std::numeric_limits<double>::infinity();
  return omega.real() / (2.0 * std::abs(omega.imag()));
}

Polarization classify(const ModeSolution& mode) {
  return mode.comp_energy[2] > mode.comp_energy[0] ? Polarization::QuasiTE
                                                   : Polarization::QuasiTM;
}

ModeSolution make_mode_solution(const OperatorPair& op, const Grid& grid,
                                cd eigenvalue, const VectorC& vec,
                                double residual) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  const FieldLayout& L = op.layout;

  ModeSolution mode;
  mode.m = op.m;
  mode.residual = residual;

  cd omega = c0 * std::sqrt(eigenvalue);
  if (omega.real() < 0.0) omega = -omega;
  if (omega.imag() > 0.0 && omega.imag() < 1e-12 * omega.real())
    omega = cd{omega.real(), 0.0};
  mode.omega = omega;
  mode.lambda_res = two_pi * c0 / omega.real();

  // expand to full staggered arrays (boundary values zero)
  mode.e_rho = VectorC::Zero(static_cast<Eigen::Index>(nr) * (nz + 1));
  mode.e_phi = VectorC::Zero(static_cast<Eigen::Index>(nr + 1) * (nz + 1));
  mode.e_z = VectorC::Zero(static_cast<Eigen::Index>(nr + 1) * nz);
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nr; ++i)
      mode.e_rho[i + static_cast<Eigen::Index>(j) * nr] = vec[L.idx_rho(i, j)];
  for (int j = 1; j < nz; ++j)
    for (int i = 1; i < nr; ++i)
      mode.e_phi[i + static_cast<Eigen::Index>(j) * (nr + 1)] = vec[L.idx_phi(i, j)];
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nr; ++i)
      mode.e_z[i + static_cast<Eigen::Index>(j) * (nr + 1)] = vec[L.idx_z(i, j)];

  // relative divergence of (eps E): junk filter for the curl-curl null space
  {
    const SparseC DIV = discrete_divergence(grid, op.m);
    const VectorC d = op.B.cwiseProduct(vec);
    const double k0 = two_pi / std::max(mode.lambda_res, 1e-12);
    mode.rel_divergence = (DIV * d).norm() / std::max(k0 * d.norm(), 1e-300);
  }

  // cell-centered intensities
  mode.cell_intensity.assign(static_cast<size_t>(nr) * nz, 0.0);
  mode.cell_weighted_intensity.assign(static_cast<size_t>(nr) * nz, 0.0);
  std::array<double, 3> n2;
  for (int k = 0; k < 3; ++k) n2[k] = op.media[k].n * op.media[k].n;

  auto erho_at = [&](int i, int j) { return mode.e_rho[i + static_cast<Eigen::Index>(j) * nr]; };
  auto ephi_at = [&](int i, int j) { return mode.e_phi[i + static_cast<Eigen::Index>(j) * (nr + 1)]; };
  auto ez_at = [&](int i, int j) { return mode.e_z[i + static_cast<Eigen::Index>(j) * (nr + 1)]; };

  std::vector<std::array<double, 3>> comp2(static_cast<size_t>(nr) * nz);
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nr; ++i) {
      const cd er = 0.5 * (erho_at(i, j) + erho_at(i, j + 1));
      const cd ep = 0.25 * (ephi_at(i, j) + ephi_at(i + 1, j) + ephi_at(i, j + 1) +
                            ephi_at(i + 1, j + 1));
      const cd ez = 0.5 * (ez_at(i, j) + ez_at(i + 1, j));
      const size_t c = grid.cell_index(i, j);
      comp2[c] = {std::norm(er), std::norm(ep), std::norm(ez)};
      mode.cell_intensity[c] = comp2[c][0] + comp2[c][1] + comp2[c][2];
      mode.cell_weighted_intensity[c] =
          n2[static_cast<int>(grid.cell_medium[c])] * mode.cell_intensity[c];
    }
  }

  // normalize: max over physical cells of n^2 |E|^2 == 1
  double w_max = 0.0;
  int peak_i = 0, peak_j = 0;
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      if (grid.cell_in_pml(i, j)) continue;
      const double w = mode.cell_weighted_intensity[grid.cell_index(i, j)];
      if (w > w_max) {
        w_max = w;
        peak_i = i;
        peak_j = j;
      }
    }
  if (w_max <= 0.0) w_max = 1.0;
  const double field_scale = 1.0 / std::sqrt(w_max);
  mode.e_rho *= field_scale;
  mode.e_phi *= field_scale;
  mode.e_z *= field_scale;
  for (size_t c = 0; c < comp2.size(); ++c) {
    for (int q = 0; q < 3; ++q) comp2[c][q] /= w_max;
    mode.cell_intensity[c] /= w_max;
    mode.cell_weighted_intensity[c] /= w_max;
  }
  mode.peak_rho = grid.rho_centers[peak_i];
  mode.peak_z = grid.z_centers[peak_j];

  // n^2-weighted component energies over the physical window
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      if (grid.cell_in_pml(i, j)) continue;
      const size_t c = grid.cell_index(i, j);
      const double vol =
          two_pi * grid.rho_centers[i] * grid.drho(i) * grid.dz(j);
      const double w = n2[static_cast<int>(grid.cell_medium[c])] * vol;
      for (int q = 0; q < 3; ++q) mode.comp_energy[q] += w * comp2[c][q];
    }
  mode.polarization = classify(mode);

  // node counting on the dominant component along cuts through the peak
  {
    const int dom = mode.comp_energy[2] >= mode.comp_energy[0] ? 2 : 0;
    auto comp_at_cell = [&](int i, int j) -> cd {
      if (dom == 2) return 0.5 * (ez_at(i, j) + ez_at(i + 1, j));
      return 0.5 * (erho_at(i, j) + erho_at(i, j + 1));
    };
    const cd peak_val = comp_at_cell(peak_i, peak_j);
    const cd phase =
        std::abs(peak_val) > 0.0 ? peak_val / std::abs(peak_val) : cd{1.0, 0.0};
    double cut_max = 0.0;
    std::vector<double> radial, axial;
    for (int i = 0; i < nr; ++i) {
      if (grid.cell_in_pml(i, peak_j)) continue;
      const double v = (comp_at_cell(i, peak_j) / phase).real();
      radial.push_back(v);
      cut_max = std::max(cut_max, std::abs(v));
    }
    for (int j = 0; j < nz; ++j) {
      if (grid.cell_in_pml(peak_i, j)) continue;
      axial.push_back((comp_at_cell(peak_i, j) / phase).real());
    }
    const double floor_mag = 0.05 * std::max(cut_max, 1e-300);
    mode.radial_nodes = count_sign_changes(radial, floor_mag);
    mode.axial_nodes = count_sign_changes(axial, floor_mag);
  }
  return mode;
}

std::vector<ModeSolution> solve_near(const OperatorPair& op, const Grid& grid,
                                     double lambda_target, double /*n_eff_guess*/,
                                     int count, const SolveOptions& opts) {
  if (count < 1) throw std::invalid_argument("solve_near: count must be >= 1");
  const cd sigma{std::pow(two_pi / lambda_target, 2), 0.0};
  const int n = op.layout.total();

  std::vector<RitzPair> pairs;
  if (n <= opts.dense_threshold) {
    // dense fallback: eigendecomposition of B^{-1} A
    Eigen::MatrixXcd G(op.A);
    for (int r = 0; r < n; ++r) G.row(r) /= op.B[r];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(G);
    if (ces.info() != Eigen::Success)
      throw SolverError("solve_near: dense eigendecomposition failed");
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(ces.eigenvalues()[a] - sigma) <
             std::abs(ces.eigenvalues()[b] - sigma);
    });
    for (int k = 0; k < std::min(count, n); ++k) {
      VectorC v = ces.eigenvectors().col(order[k]);
      v.normalize();
      const cd lam = ces.eigenvalues()[order[k]];
      const double res = pair_residual(op, lam, v);
      pairs.push_back({lam, std::move(v), res});
    }
  } else {
    int kdim = std::max(opts.krylov_dim, 3 * count + 12);
    std::uint64_t seed = opts.seed;
    for (int attempt = 0; attempt <= opts.max_restarts; ++attempt) {
      std::vector<RitzPair> got = arnoldi_shift_invert(
          op, sigma, kdim, count, opts.residual_tol, seed, opts.verbose);
      // merge, dropping duplicates
      for (auto& p : got) {
        bool dup = false;
        for (const auto& q : pairs)
          if (std::abs(p.lambda - q.lambda) <= 1e-8 * std::abs(q.lambda)) dup = true;
        if (!dup) pairs.push_back(std::move(p));
      }
      if (static_cast<int>(pairs.size()) >= count) break;
      kdim = kdim * 3 / 2;
      seed = seed * 6364136223846793005ull + 1442695040888963407ull;
    }
    if (pairs.empty())
      throw SolverError(
          "solve_near: no eigenpair converged to the residual tolerance");
  }

  std::sort(pairs.begin(), pairs.end(), [&](const RitzPair& a, const RitzPair& b) {
    return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma);
  });
  if (static_cast<int>(pairs.size()) > count) pairs.resize(count);

  std::vector<ModeSolution> modes;
  modes.reserve(pairs.size());
  for (const auto& p : pairs)
    modes.push_back(make_mode_solution(op, grid, p.lambda, p.vec, p.residual));
  return modes;
}

RefinedPair refine_eigenpair(const OperatorPair& op, cd lambda0, const VectorC& v0,
                             int iterations) {
  RefinedPair best;
  best.vec = v0;
  best.vec.normalize();
  best.eigenvalue = lambda0;
  best.residual = pair_residual(op, lambda0, best.vec);

  double offset = 3e-6;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const cd sigma = lambda0 * (1.0 + offset * cd{1.0, 0.7});
    Eigen::SparseLU<SparseC> lu;
    {
      const SparseC S = shifted_matrix(op, sigma);
      lu.compute(S);
    }
    if (lu.info() != Eigen::Success) {
      offset *= 16.0;
      continue;
    }
    VectorC v = best.vec;
    for (int it = 0; it < iterations; ++it) {
      VectorC w = lu.solve(op.B.cwiseProduct(v));
      w.normalize();
      v = w;
      const VectorC av = op.A * v;
      const VectorC bv = op.B.cwiseProduct(v);
      const cd lam = bv.dot(av) / bv.dot(bv);
      const double res = (av - lam * bv).norm() /
                         std::max(av.norm() + std::abs(lam) * bv.norm(), 1e-300);
      if (res < best.residual) {
        best.eigenvalue = lam;
        best.vec = v;
        best.residual = res;
      }
      if (res < 1e-14) return best;
    }
    return best;
  }
  return best;  // refinement unavailable; caller keeps the Arnoldi pair
}

namespace {

struct ScanState {
  std::optional<GeometryModes::Entry> te, tm;
  double best_dist_te = std::numeric_limits<double>::infinity();
  double best_dist_tm = std::numeric_limits<double>::infinity();
};

} // namespace

GeometryModes solve_geometry(const CrossSection& cs, double lambda_target,
                             const ResolutionSpec& res, const PmlSpec& pml,
                             const SolveOptions& opts, bool need_te, bool need_tm,
                             bool need_lossy) {
  GeometryModes out;
  out.grid = build_grid(cs, res, pml, lambda_target);
  const Grid& grid = out.grid;
  const auto& media = cs.media();

  int m_guess = grid.m_estimate;
  if (opts.n_eff_guess > 0.0)
    m_guess = static_cast<int>(std::lround(
        two_pi * cs.rim_radius() * opts.n_eff_guess / lambda_target));

  // Physical fundamentals peak at the cavity rim; junk (PML resonances,
  // wall modes) peaks elsewhere.
  const double rim = cs.rim_radius();
  const double outer = cs.outer_radius();
  auto peak_plausible = [&](const ModeSolution& mode) {
    return mode.peak_rho > 0.5 * rim &&
           mode.peak_rho < outer + 0.75 * lambda_target &&
           std::abs(mode.peak_z) < cs.half_height() + 0.75 * lambda_target;
  };

  ScanState st;
  std::set<int> visited;
  std::deque<int> queue{std::max(m_guess, 1)};
  int no_candidate_streak = 0;
  while (!queue.empty() &&
         static_cast<int>(visited.size()) < opts.max_m_hops) {
    const int m = queue.front();
    queue.pop_front();
    if (visited.count(m)) continue;
    visited.insert(m);
    if (opts.verbose) std::cerr << "scan m=" << m << "\n";

    const OperatorPair op = assemble(grid, m, media, lambda_target, false);
    std::vector<ModeSolution> modes =
        solve_near(op, grid, lambda_target, 0.0, opts.count, opts);

    bool any = false;
    for (auto& mode : modes) {
      if (mode.rel_divergence > opts.divergence_tol) continue;
      if (mode.radial_nodes != 0 || mode.axial_nodes != 0) continue;
      if (!peak_plausible(mode)) continue;
      any = true;
      // hop toward the target using m lambda ~ const for this mode family
      const int m_next =
          static_cast<int>(std::lround(m * mode.lambda_res / lambda_target));
      if (m_next >= 1 && !visited.count(m_next) &&
          std::find(queue.begin(), queue.end(), m_next) == queue.end() &&
          std::abs(m_next - m_guess) < 16)
        queue.push_back(m_next);
      const double dist = std::abs(mode.lambda_res - lambda_target);
      if (mode.polarization == Polarization::QuasiTE && dist < st.best_dist_te) {
        st.best_dist_te = dist;
        st.te = GeometryModes::Entry{m, std::move(mode), std::nullopt};
      } else if (mode.polarization == Polarization::QuasiTM &&
                 dist < st.best_dist_tm) {
        st.best_dist_tm = dist;
        st.tm = GeometryModes::Entry{m, std::move(mode), std::nullopt};
      }
    }
    if (!any && queue.empty() && ++no_candidate_streak <= 2) {
      if (!visited.count(m + no_candidate_streak))
        queue.push_back(m + no_candidate_streak);
      if (m - no_candidate_streak >= 1 && !visited.count(m - no_candidate_streak))
        queue.push_back(m - no_candidate_streak);
    }
  }

  auto finalize = [&](GeometryModes::Entry& entry) {
    const OperatorPair op_ll =
        assemble(grid, entry.m, media, lambda_target, false);
    const cd lam0 = std::pow(entry.lossless.omega / c0, 2);
    // raw unknown vector back from the stored mode fields
    VectorC v(op_ll.layout.total());
    const int nr = grid.n_rho(), nz = grid.n_z();
    for (int j = 1; j < nz; ++j)
      for (int i = 0; i < nr; ++i)
        v[op_ll.layout.idx_rho(i, j)] =
            entry.lossless.e_rho[i + static_cast<Eigen::Index>(j) * nr];
    for (int j = 1; j < nz; ++j)
      for (int i = 1; i < nr; ++i)
        v[op_ll.layout.idx_phi(i, j)] =
            entry.lossless.e_phi[i + static_cast<Eigen::Index>(j) * (nr + 1)];
    for (int j = 0; j < nz; ++j)
      for (int i = 1; i < nr; ++i)
        v[op_ll.layout.idx_z(i, j)] =
            entry.lossless.e_z[i + static_cast<Eigen::Index>(j) * (nr + 1)];

    VectorC v_ll = v;
    cd lam_ll = lam0;
    if (opts.polish) {
      const RefinedPair rp =
          refine_eigenpair(op_ll, lam0, v, opts.polish_iterations);
      lam_ll = rp.eigenvalue;
      v_ll = rp.vec;
      entry.lossless = make_mode_solution(op_ll, grid, rp.eigenvalue, rp.vec,
                                          rp.residual);
    }
    if (need_lossy) {
      const OperatorPair op_ab =
          assemble(grid, entry.m, media, lambda_target, true);
      const RefinedPair rp =
          refine_eigenpair(op_ab, lam_ll, v_ll, opts.polish_iterations);
      entry.lossy = make_mode_solution(op_ab, grid, rp.eigenvalue, rp.vec,
                                       rp.residual);
    }
  };

  if (need_te) {
    if (!st.te)
      throw SolverError(
          "find_fundamental: no single-lobe quasi-TE mode found near the target "
          "wavelength (scanned m around " + std::to_string(m_guess) + ")");
    finalize(*st.te);
    out.te = std::move(st.te);
  }
  if (need_tm) {
    if (!st.tm)
      throw SolverError(
          "find_fundamental: no single-lobe quasi-TM mode found near the target "
          "wavelength (scanned m around " + std::to_string(m_guess) + ")");
    finalize(*st.tm);
    out.tm = std::move(st.tm);
  }
  return out;
}

FundamentalResult find_fundamental(const CrossSection& cs, Polarization pol,
                                   double lambda_target, const ResolutionSpec& res,
                                   const PmlSpec& pml, const SolveOptions& opts) {
  if (lambda_target <= 0.0)
    throw std::invalid_argument("find_fundamental: lambda_target must be positive");
  const bool te = pol == Polarization::QuasiTE;
  GeometryModes gm = solve_geometry(cs, lambda_target, res, pml, opts, te, !te,
                                    opts.include_absorption);
  auto& entry = te ? gm.te : gm.tm;
  FundamentalResult out;
  out.m = entry->m;
  out.mode = opts.include_absorption ? std::move(*entry->lossy)
                                     : std::move(entry->lossless);
  return out;
}

} // namespace wgcav
