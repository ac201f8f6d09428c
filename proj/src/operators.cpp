#include "wgcav/operators.hpp"

#include <stdexcept>
#include <vector>

#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

using cd = std::complex<double>;
using Triplet = Eigen::Triplet<cd>;

// Inverse stretch integrand 1/f along one axis, used to analytically continue
// rho into the PML: rho_t(x) = rho_start + int 1/f du.
cd stretched_rho(double x, const Grid& g) {
  const double start = g.rho_window_hi();
  if (x <= start) return {x, 0.0};
  const int n = 64;
  cd acc{0.0, 0.0};
  const double h = (x - start) / n;
  auto inv_f = [&](double u) {
    return 1.0 / stretch_factor(u, Axis::Rho, g.pml_spec, g);
  };
  for (int k = 0; k < n; ++k) {
    const double a = start + k * h;
    acc += h / 6.0 * (inv_f(a) + 4.0 * inv_f(a + 0.5 * h) + inv_f(a + h));
  }
  return cd{start, 0.0} + acc;
}

struct StretchTables {
  std::vector<cd> f_re, f_rc;    // derivative multipliers, rho edges/centers
  std::vector<cd> f_ze, f_zc;    // z edges/centers
  std::vector<cd> rt_e, rt_c;    // stretched rho at edges/centers

  explicit StretchTables(const Grid& g) {
    const int nr = g.n_rho(), nz = g.n_z();
    f_re.resize(nr + 1);
    rt_e.resize(nr + 1);
    for (int i = 0; i <= nr; ++i) {
      f_re[i] = stretch_factor(g.rho_edges[i], Axis::Rho, g.pml_spec, g);
      rt_e[i] = stretched_rho(g.rho_edges[i], g);
    }
    f_rc.resize(nr);
    rt_c.resize(nr);
    for (int i = 0; i < nr; ++i) {
      f_rc[i] = stretch_factor(g.rho_centers[i], Axis::Rho, g.pml_spec, g);
      rt_c[i] = stretched_rho(g.rho_centers[i], g);
    }
    f_ze.resize(nz + 1);
    for (int j = 0; j <= nz; ++j)
      f_ze[j] = stretch_factor(g.z_edges[j], Axis::Z, g.pml_spec, g);
    f_zc.resize(nz);
    for (int j = 0; j < nz; ++j)
      f_zc[j] = stretch_factor(g.z_centers[j], Axis::Z, g.pml_spec, g);
  }
};

// H locations: H_rho at (edge i in [1,nr), center j), H_phi at (center, center),
// H_z at (center, edge j in [1,nz)).
struct HLayout {
  int nr, nz;
  int n_rho() const { return (nr - 1) * nz; }
  int n_phi() const { return nr * nz; }
  int n_zc() const { return nr * (nz - 1); }
  int total() const { return n_rho() + n_phi() + n_zc(); }
  int idx_rho(int i, int j) const { return (i - 1) + j * (nr - 1); }
  int idx_phi(int i, int j) const { return n_rho() + i + j * nr; }
  int idx_z(int i, int j) const { return n_rho() + n_phi() + i + (j - 1) * nr; }
};

} // namespace

std::complex<double> effective_eps(const SubcellEps& sc,
                                   const std::array<std::complex<double>, 3>& eps) {
  cd arith{0.0, 0.0};
  cd inv_harm{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    arith += sc.frac[k] * eps[k];
    inv_harm += sc.frac[k] / eps[k];
  }
  const cd inv_eff = sc.normal_sq * inv_harm + (1.0 - sc.normal_sq) / arith;
  return 1.0 / inv_eff;
}

OperatorPair assemble(const Grid& grid, int m, const std::array<Medium, 3>& media,
                      double lambda_eval, bool include_absorption) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  if (nr < 3 || nz < 3) throw std::invalid_argument("assemble: grid too small");
  if (grid.eps_rho.size() != static_cast<size_t>(nr) * (nz + 1))
    throw std::invalid_argument("assemble: grid subcell data inconsistent with grid size");
  if (m < 0) throw std::invalid_argument("assemble: azimuthal order must be >= 0");

  const FieldLayout L{nr, nz};
  const HLayout H{nr, nz};
  const StretchTables st(grid);
  const cd im{0.0, static_cast<double>(m)};

  // ---- K_E: discrete curl from E unknowns to H locations ----
  std::vector<Triplet> ke;
  ke.reserve(static_cast<size_t>(H.total()) * 4);
  for (int j = 0; j < nz; ++j) {
    const double dzj = grid.dz(j);
    for (int i = 1; i < nr; ++i) {
      const int row = H.idx_rho(i, j);
      ke.emplace_back(row, L.idx_z(i, j), im / st.rt_e[i]);
      const cd czz = st.f_zc[j] / dzj;
      if (j + 1 < nz) ke.emplace_back(row, L.idx_phi(i, j + 1), -czz);
      if (j >= 1) ke.emplace_back(row, L.idx_phi(i, j), czz);
    }
  }
  for (int j = 0; j < nz; ++j) {
    const double dzj = grid.dz(j);
    for (int i = 0; i < nr; ++i) {
      const int row = H.idx_phi(i, j);
      const cd cz = st.f_zc[j] / dzj;
      if (j + 1 < nz) ke.emplace_back(row, L.idx_rho(i, j + 1), cz);
      if (j >= 1) ke.emplace_back(row, L.idx_rho(i, j), -cz);
      const cd cr = st.f_rc[i] / grid.drho(i);
      if (i + 1 < nr) ke.emplace_back(row, L.idx_z(i + 1, j), -cr);
      if (i >= 1) ke.emplace_back(row, L.idx_z(i, j), cr);
    }
  }
  for (int j = 1; j < nz; ++j) {
    for (int i = 0; i < nr; ++i) {
      const int row = H.idx_z(i, j);
      const cd cr = st.f_rc[i] / (st.rt_c[i] * grid.drho(i));
      if (i + 1 < nr) ke.emplace_back(row, L.idx_phi(i + 1, j), cr * st.rt_e[i + 1]);
      if (i >= 1) ke.emplace_back(row, L.idx_phi(i, j), -cr * st.rt_e[i]);
      ke.emplace_back(row, L.idx_rho(i, j), -im / st.rt_c[i]);
    }
  }

  // ---- K_H: discrete curl from H locations back to the E rows ----
  std::vector<Triplet> kh;
  kh.reserve(static_cast<size_t>(L.total()) * 4);
  for (int j = 1; j < nz; ++j) {
    const double dzp = grid.z_centers[j] - grid.z_centers[j - 1];
    for (int i = 0; i < nr; ++i) {
      const int row = L.idx_rho(i, j);
      kh.emplace_back(row, H.idx_z(i, j), im / st.rt_c[i]);
      const cd cz = st.f_ze[j] / dzp;
      kh.emplace_back(row, H.idx_phi(i, j), -cz);
      kh.emplace_back(row, H.idx_phi(i, j - 1), cz);
    }
  }
  for (int j = 1; j < nz; ++j) {
    const double dzp = grid.z_centers[j] - grid.z_centers[j - 1];
    for (int i = 1; i < nr; ++i) {
      const int row = L.idx_phi(i, j);
      const cd cz = st.f_ze[j] / dzp;
      kh.emplace_back(row, H.idx_rho(i, j), cz);
      kh.emplace_back(row, H.idx_rho(i, j - 1), -cz);
      const cd cr = st.f_re[i] / (grid.rho_centers[i] - grid.rho_centers[i - 1]);
      kh.emplace_back(row, H.idx_z(i, j), -cr);
      kh.emplace_back(row, H.idx_z(i - 1, j), cr);
    }
  }
  for (int j = 0; j < nz; ++j) {
    for (int i = 1; i < nr; ++i) {
      const int row = L.idx_z(i, j);
      const cd cr = st.f_re[i] /
                    (st.rt_e[i] * (grid.rho_centers[i] - grid.rho_centers[i - 1]));
      kh.emplace_back(row, H.idx_phi(i, j), cr * st.rt_c[i]);
      kh.emplace_back(row, H.idx_phi(i - 1, j), -cr * st.rt_c[i - 1]);
      kh.emplace_back(row, H.idx_rho(i, j), -im / st.rt_e[i]);
    }
  }

  SparseC KE(H.total(), L.total());
  KE.setFromTriplets(ke.begin(), ke.end());
  SparseC KH(L.total(), H.total());
  KH.setFromTriplets(kh.begin(), kh.end());

  OperatorPair op;
  op.A = (KH * KE).pruned(1e-300);
  op.A.makeCompressed();
  op.layout = L;
  op.m = m;
  op.lambda_eval = lambda_eval;
  op.absorption = include_absorption;
  op.media = media;

  // ---- B: effective permittivity at each unknown ----
  std::array<cd, 3> eps;
  for (int k = 0; k < 3; ++k) {
    const ComplexIndex ci = complex_index(media[k], lambda_eval);
    const cd n = include_absorption ? ci.value() : cd{ci.re, 0.0};
    eps[k] = n * n;
  }
  op.B.resize(L.total());
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nr; ++i)
      op.B[L.idx_rho(i, j)] =
          effective_eps(grid.eps_rho[i + static_cast<size_t>(j) * nr], eps);
  for (int j = 1; j < nz; ++j)
    for (int i = 1; i < nr; ++i)
      op.B[L.idx_phi(i, j)] =
          effective_eps(grid.eps_phi[i + static_cast<size_t>(j) * (nr + 1)], eps);
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nr; ++i)
      op.B[L.idx_z(i, j)] =
          effective_eps(grid.eps_z[i + static_cast<size_t>(j) * (nr + 1)], eps);
  return op;
}

SparseC discrete_gradient(const Grid& grid, int m) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  const FieldLayout L{nr, nz};
  const StretchTables st(grid);
  const cd im{0.0, static_cast<double>(m)};
  auto node = [&](int i, int j) { return (i - 1) + (j - 1) * (nr - 1); };
  const int n_nodes = (nr - 1) * (nz - 1);

  std::vector<Triplet> tr;
  for (int j = 1; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      const cd c = st.f_rc[i] / grid.drho(i);
      if (i + 1 < nr) tr.emplace_back(L.idx_rho(i, j), node(i + 1, j), c);
      if (i >= 1) tr.emplace_back(L.idx_rho(i, j), node(i, j), -c);
    }
  for (int j = 1; j < nz; ++j)
    for (int i = 1; i < nr; ++i)
      tr.emplace_back(L.idx_phi(i, j), node(i, j), im / st.rt_e[i]);
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nr; ++i) {
      const cd c = st.f_zc[j] / grid.dz(j);
      if (j + 1 < nz) tr.emplace_back(L.idx_z(i, j), node(i, j + 1), c);
      if (j >= 1) tr.emplace_back(L.idx_z(i, j), node(i, j), -c);
    }
  SparseC G(L.total(), n_nodes);
  G.setFromTriplets(tr.begin(), tr.end());
  return G;
}

SparseC discrete_divergence(const Grid& grid, int m) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  const FieldLayout L{nr, nz};
  const StretchTables st(grid);
  const cd im{0.0, static_cast<double>(m)};
  auto node = [&](int i, int j) { return (i - 1) + (j - 1) * (nr - 1); };
  const int n_nodes = (nr - 1) * (nz - 1);

  std::vector<Triplet> tr;
  for (int j = 1; j < nz; ++j)
    for (int i = 1; i < nr; ++i) {
      const int row = node(i, j);
      const double drp = grid.rho_centers[i] - grid.rho_centers[i - 1];
      const cd cr = st.f_re[i] / (st.rt_e[i] * drp);
      tr.emplace_back(row, L.idx_rho(i, j), cr * st.rt_c[i]);
      tr.emplace_back(row, L.idx_rho(i - 1, j), -cr * st.rt_c[i - 1]);
      tr.emplace_back(row, L.idx_phi(i, j), im / st.rt_e[i]);
      const double dzp = grid.z_centers[j] - grid.z_centers[j - 1];
      const cd cz = st.f_ze[j] / dzp;
      tr.emplace_back(row, L.idx_z(i, j), cz);
      tr.emplace_back(row, L.idx_z(i, j - 1), -cz);
    }
  SparseC D(n_nodes, L.total());
  D.setFromTriplets(tr.begin(), tr.end());
  return D;
}

Eigen::VectorXd metric_weights(const Grid& grid) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  const FieldLayout L{nr, nz};
  Eigen::VectorXd w(L.total());
  for (int j = 1; j < nz; ++j) {
    const double dzp = grid.z_centers[j] - grid.z_centers[j - 1];
    for (int i = 0; i < nr; ++i)
      w[L.idx_rho(i, j)] = grid.rho_centers[i] * grid.drho(i) * dzp;
  }
  for (int j = 1; j < nz; ++j) {
    const double dzp = grid.z_centers[j] - grid.z_centers[j - 1];
    for (int i = 1; i < nr; ++i)
      w[L.idx_phi(i, j)] = grid.rho_edges[i] *
                           (grid.rho_centers[i] - grid.rho_centers[i - 1]) * dzp;
  }
  for (int j = 0; j < nz; ++j)
    for (int i = 1; i < nr; ++i)
      w[L.idx_z(i, j)] = grid.rho_edges[i] *
                         (grid.rho_centers[i] - grid.rho_centers[i - 1]) *
                         grid.dz(j);
  return w;
}

} // namespace wgcav
