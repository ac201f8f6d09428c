#include "wgcav/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wgcav/constants.hpp"

namespace wgcav {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_q(double q) { return fmt(QualityBudget::reported(q)); }

json report_json(const QedReport& r) {
  json o;
  o["geometry_variant"] = r.geometry_variant;
  o["R_m"] = r.R;
  o["Rminor_m"] = r.R_minor;
  o["t_m"] = r.t;
  o["uncoated"] = r.uncoated;
  o["polarization"] = polarization_name(r.polarization);
  o["m"] = r.m;
  o["lambda_res_m"] = r.lambda_res;
  o["Q_total"] = QualityBudget::reported(r.budget.q_total);
  o["Q_rad"] = QualityBudget::reported(r.budget.q_rad);
  o["Q_abs"] = QualityBudget::reported(r.budget.q_abs);
  o["Q_total_sentinel"] = QualityBudget::is_sentinel(r.budget.q_total);
  o["Q_rad_sentinel"] = QualityBudget::is_sentinel(r.budget.q_rad);
  o["Q_abs_sentinel"] = QualityBudget::is_sentinel(r.budget.q_abs);
  o["V_m_m3"] = r.v_m;
  o["Gamma_coating"] = r.gamma_coating;
  o["f"] = r.f;
  o["g_max_over_2pi_Hz"] = r.g_max_over_2pi;
  o["g_eff_over_2pi_Hz"] = r.g_eff_over_2pi;
  o["kappa_over_2pi_Hz"] = r.kappa_over_2pi;
  o["gamma_eff_over_2pi_Hz"] = r.gamma_eff_over_2pi;
  o["g_over_kappa"] = std::isfinite(r.g_over_kappa) ? r.g_over_kappa : 0.0;
  o["cooperativity"] = std::isfinite(r.cooperativity) ? r.cooperativity : 0.0;
  o["strong_coupling"] = r.strong_coupling;
  return o;
}

struct SweepPoint {
  double R, t;
};

SweepPointResult solve_point(const RunConfig& cfg, const SweepPoint& pt) {
  SweepPointResult row;
  row.R = pt.R;
  row.t = pt.t;
  const auto start = std::chrono::steady_clock::now();
  try {
    const CrossSection cs = cfg.cross_section(pt.R, pt.t);
    bool need_te = false, need_tm = false;
    for (Polarization p : cfg.polarizations) {
      if (p == Polarization::QuasiTE) need_te = true;
      if (p == Polarization::QuasiTM) need_tm = true;
    }
    const GeometryModes gm = solve_geometry(cs, cfg.lambda_target, cfg.resolution,
                                            cfg.pml, cfg.solver, need_te, need_tm,
                                            /*need_lossy=*/true);
    row.grid_nr = gm.grid.n_rho();
    row.grid_nz = gm.grid.n_z();
    if (need_te)
      row.te = build_report(cs, gm.te->m, gm.te->lossless, *gm.te->lossy, gm.grid,
                            cfg.dipole, cfg.embedding_eps);
    if (need_tm)
      row.tm = build_report(cs, gm.tm->m, gm.tm->lossless, *gm.tm->lossy, gm.grid,
                            cfg.dipole, cfg.embedding_eps);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return row;
}

std::string error_csv_row(const RunConfig& cfg, const SweepPointResult& row,
                          Polarization pol) {
  std::ostringstream os;
  const char* variant = cfg.variant == RunConfig::Variant::CoatedToroid
                            ? "coated_toroid"
                            : cfg.variant == RunConfig::Variant::CoatedSphere
                                  ? "coated_sphere"
                                  : "cylinder";
  const double rminor =
      cfg.variant == RunConfig::Variant::CoatedToroid ? cfg.minor_radius : 0.0;
  os << variant << ',' << fmt(row.R) << ',' << fmt(rminor) << ',' << fmt(row.t)
     << ',' << polarization_name(pol) << ",nan,nan,nan,nan,nan,nan,nan,nan,nan,"
     << "nan,nan,nan," << cfg.config_hash;
  return os.str();
}

} // namespace

std::string csv_header() {
  return "geometry_variant,R_m,Rminor_m,t_m,polarization,m,lambda_res_m,Q_total,"
         "Q_rad,Q_abs,V_m_m3,Gamma_coating,f,g_max_over_2pi_Hz,g_eff_over_2pi_Hz,"
         "kappa_over_2pi_Hz,gamma_eff_over_2pi_Hz,config_hash";
}

std::string csv_row(const QedReport& r, const std::string& config_hash) {
  std::ostringstream os;
  os << r.geometry_variant << ',' << fmt(r.R) << ',' << fmt(r.R_minor) << ','
     << fmt(r.t) << ',' << polarization_name(r.polarization) << ',' << r.m << ','
     << fmt(r.lambda_res) << ',' << fmt_q(r.budget.q_total) << ','
     << fmt_q(r.budget.q_rad) << ',' << fmt_q(r.budget.q_abs) << ','
     << fmt(r.v_m) << ',' << fmt(r.gamma_coating) << ',' << fmt(r.f) << ','
     << fmt(r.g_max_over_2pi) << ',' << fmt(r.g_eff_over_2pi) << ','
     << fmt(r.kappa_over_2pi) << ',' << fmt(r.gamma_eff_over_2pi) << ','
     << config_hash;
  return os.str();
}

std::vector<SweepPointResult> execute_sweep(const RunConfig& cfg,
                                            std::ostream* log) {
  std::vector<SweepPoint> points;
  for (double R : cfg.major_radii)
    for (double t : cfg.thicknesses) points.push_back({R, t});
  std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    if (a.R != b.R) return a.R < b.R;
    return a.t < b.t;
  });

  std::vector<SweepPointResult> rows(points.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  const int n_workers =
      std::max(1, std::min<int>(cfg.max_workers, static_cast<int>(points.size())));

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      rows[i] = solve_point(cfg, points[i]);
      if (log) {
        std::lock_guard<std::mutex> lk(log_mutex);
        *log << "point R=" << fmt(points[i].R) << " t=" << fmt(points[i].t)
             << (rows[i].error.empty() ? " done" : " FAILED: " + rows[i].error)
             << " (" << fmt(rows[i].wall_seconds) << " s)\n";
        log->flush();
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  return rows;
}

std::string sweep_csv(const RunConfig& cfg,
                      const std::vector<SweepPointResult>& rows) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const auto& row : rows) {
    for (Polarization pol : {Polarization::QuasiTE, Polarization::QuasiTM}) {
      const bool wanted =
          std::find(cfg.polarizations.begin(), cfg.polarizations.end(), pol) !=
          cfg.polarizations.end();
      if (!wanted) continue;
      const auto& rep = pol == Polarization::QuasiTE ? row.te : row.tm;
      if (!row.error.empty() || !rep)
        os << error_csv_row(cfg, row, pol) << '\n';
      else
        os << csv_row(*rep, cfg.config_hash) << '\n';
    }
  }
  return os.str();
}

std::string sweep_json(const RunConfig& cfg,
                       const std::vector<SweepPointResult>& rows,
                       bool include_wall_time) {
  json out;
  out["config_hash"] = cfg.config_hash;
  out["rows"] = json::array();
  for (const auto& row : rows) {
    json jrow;
    jrow["R_m"] = row.R;
    jrow["t_m"] = row.t;
    if (!row.error.empty()) jrow["error"] = row.error;
    json prov;
    prov["grid_cells"] = {row.grid_nr, row.grid_nz};
    if (include_wall_time) prov["wall_time_s"] = row.wall_seconds;
    double residual = 0.0;
    if (row.te) residual = std::max(residual, row.te->solver_residual);
    if (row.tm) residual = std::max(residual, row.tm->solver_residual);
    prov["solver_residual"] = residual;
    prov["config_hash"] = cfg.config_hash;
    jrow["provenance"] = prov;
    if (row.te) jrow["TE"] = report_json(*row.te);
    if (row.tm) jrow["TM"] = report_json(*row.tm);
    out["rows"].push_back(jrow);
  }
  return out.dump(2);
}

void dump_field_text(const ModeSolution& mode, const Grid& grid,
                     std::ostream& os) {
  const int nr = grid.n_rho(), nz = grid.n_z();
  auto erho_at = [&](int i, int j) { return mode.e_rho[i + static_cast<Eigen::Index>(j) * nr]; };
  auto ephi_at = [&](int i, int j) { return mode.e_phi[i + static_cast<Eigen::Index>(j) * (nr + 1)]; };
  auto ez_at = [&](int i, int j) { return mode.e_z[i + static_cast<Eigen::Index>(j) * (nr + 1)]; };
  os << "rho_m z_m medium Re_Erho Im_Erho Re_Ephi Im_Ephi Re_Ez Im_Ez\n";
  for (int j = 0; j < nz; ++j)
    for (int i = 0; i < nr; ++i) {
      const std::complex<double> er = 0.5 * (erho_at(i, j) + erho_at(i, j + 1));
      const std::complex<double> ep =
          0.25 * (ephi_at(i, j) + ephi_at(i + 1, j) + ephi_at(i, j + 1) +
                  ephi_at(i + 1, j + 1));
      const std::complex<double> ez = 0.5 * (ez_at(i, j) + ez_at(i + 1, j));
      os << fmt(grid.rho_centers[i]) << ' ' << fmt(grid.z_centers[j]) << ' '
         << medium_name(grid.medium_of_cell(i, j)) << ' ' << fmt(er.real())
         << ' ' << fmt(er.imag()) << ' ' << fmt(ep.real()) << ' '
         << fmt(ep.imag()) << ' ' << fmt(ez.real()) << ' ' << fmt(ez.imag())
         << '\n';
    }
}

std::vector<ValidationRow> execute_validation(const RunConfig& cfg,
                                              std::ostream* log) {
  if (cfg.variant != RunConfig::Variant::CoatedSphere)
    throw ConfigError("validate: spherical geometry required");
  if (cfg.is_sweep())
    throw ConfigError("validate: scalar geometry required");

  const CrossSection cs = cfg.cross_section(cfg.major_radii[0], cfg.thicknesses[0]);
  std::vector<ValidationRow> rows;

  bool need_te = false, need_tm = false;
  for (Polarization p : cfg.polarizations) {
    if (p == Polarization::QuasiTE) need_te = true;
    else need_tm = true;
  }
  const GeometryModes gm = solve_geometry(cs, cfg.lambda_target, cfg.resolution,
                                          cfg.pml, cfg.solver, need_te, need_tm,
                                          /*need_lossy=*/false);

  auto add_row = [&](const GeometryModes::Entry& entry, Polarization pol) {
    ValidationRow row;
    row.polarization = pol;
    row.l = entry.m;
    row.lambda_numeric = entry.lossless.lambda_res;
    row.q_rad_numeric = quality_factor(entry.lossless.omega);

    const ExactPolarization xpol = pol == Polarization::QuasiTE
                                       ? ExactPolarization::TE
                                       : ExactPolarization::TM;
    const auto prob = LayeredRadialProblem::from_sphere(
        cs, xpol, entry.m, cfg.lambda_target, /*include_absorption=*/false);
    // bracket the numeric resonance well inside one FSR
    const double fsr = row.lambda_numeric * row.lambda_numeric /
                       (2.0 * constants::pi * cs.rim_radius() *
                        cs.medium(MediumId::Core).n);
    const auto res = find_resonance(prob, entry.m,
                                    {row.lambda_numeric - 0.45 * fsr,
                                     row.lambda_numeric + 0.45 * fsr},
                                    800);
    row.lambda_analytic = res.lambda_res;
    row.q_rad_analytic = res.q_rad;
    row.lambda_rel_err =
        std::abs(row.lambda_numeric - row.lambda_analytic) / row.lambda_analytic;
    row.q_checked = res.q_rad <= 1e9;
    row.log10_q_diff =
        row.q_checked
            ? std::abs(std::log10(std::min(row.q_rad_numeric, 1e15)) -
                       std::log10(row.q_rad_analytic))
            : 0.0;
    row.pass = row.lambda_rel_err <= cfg.validate_lambda_tol &&
               (!row.q_checked || row.log10_q_diff <= cfg.validate_log10_q_tol);
    if (log) {
      *log << "validate l=" << row.l << " pol=" << polarization_name(pol)
           << " lambda_num=" << fmt(row.lambda_numeric)
           << " lambda_ana=" << fmt(row.lambda_analytic)
           << " rel_err=" << fmt(row.lambda_rel_err)
           << " Qrad_num=" << fmt(row.q_rad_numeric)
           << " Qrad_ana=" << fmt(row.q_rad_analytic)
           << (row.q_checked ? "" : " (Q beyond 1e9: lambda check only)")
           << (row.pass ? " PASS" : " FAIL") << "\n";
    }
    rows.push_back(row);
  };
  if (need_te) add_row(*gm.te, Polarization::QuasiTE);
  if (need_tm) add_row(*gm.tm, Polarization::QuasiTM);
  return rows;
}

namespace {

void ensure_outdir(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int finish_sweep_outputs(const RunConfig& cfg,
                         const std::vector<SweepPointResult>& rows,
                         std::ostream& log) {
  ensure_outdir(cfg);
  if (cfg.write_csv)
    write_text(cfg.out_dir + "/results.csv", sweep_csv(cfg, rows));
  if (cfg.write_json)
    write_text(cfg.out_dir + "/results.json", sweep_json(cfg, rows));
  size_t failed = 0;
  for (const auto& r : rows)
    if (!r.error.empty()) ++failed;
  log << rows.size() - failed << "/" << rows.size() << " points succeeded; "
      << "outputs in " << cfg.out_dir << "\n";
  if (failed == rows.size()) return exit_solver_failure;
  return exit_ok;
}

} // namespace

int run_single(const RunConfig& cfg, std::ostream& log) {
  if (cfg.is_sweep())
    throw ConfigError("solve: scalar geometry required (use the sweep command)");
  std::vector<SweepPointResult> rows = execute_sweep(cfg, &log);
  const int code = finish_sweep_outputs(cfg, rows, log);
  if (code != exit_ok) {
    log << "solve failed: " << rows[0].error << "\n";
    return exit_solver_failure;
  }
  if (cfg.field_dump) {
    // re-solve lossless fields for the map (cheap relative to the run)
    const CrossSection cs =
        cfg.cross_section(cfg.major_radii[0], cfg.thicknesses[0]);
    for (Polarization pol : cfg.polarizations) {
      const FundamentalResult fr = find_fundamental(
          cs, pol, cfg.lambda_target, cfg.resolution, cfg.pml, cfg.solver);
      const Grid grid = build_grid(cs, cfg.resolution, cfg.pml, cfg.lambda_target);
      std::ofstream out(cfg.out_dir + "/field_" +
                        polarization_name(pol) + ".txt");
      dump_field_text(fr.mode, grid, out);
    }
  }
  return exit_ok;
}

int run_sweep(const RunConfig& cfg, std::ostream& log) {
  std::vector<SweepPointResult> rows = execute_sweep(cfg, &log);
  return finish_sweep_outputs(cfg, rows, log);
}

int run_validate(const RunConfig& cfg, std::ostream& log) {
  const std::vector<ValidationRow> rows = execute_validation(cfg, &log);
  ensure_outdir(cfg);
  std::ostringstream os;
  os << csv_header() << ",method\n";
  for (const auto& r : rows) {
    const char* pol = polarization_name(r.polarization);
    const char* variant = "coated_sphere";
    os << variant << ',' << fmt(cfg.major_radii[0]) << ",0," << fmt(cfg.thicknesses[0])
       << ',' << pol << ',' << r.l << ',' << fmt(r.lambda_numeric) << ",nan,"
       << fmt_q(r.q_rad_numeric) << ",nan,nan,nan,nan,nan,nan,nan,nan,"
       << cfg.config_hash << ",numeric\n";
    os << variant << ',' << fmt(cfg.major_radii[0]) << ",0," << fmt(cfg.thicknesses[0])
       << ',' << pol << ',' << r.l << ',' << fmt(r.lambda_analytic) << ",nan,"
       << fmt_q(r.q_rad_analytic) << ",nan,nan,nan,nan,nan,nan,nan,nan,"
       << cfg.config_hash << ",analytic\n";
  }
  write_text(cfg.out_dir + "/validate.csv", os.str());
  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && r.pass;
  log << (all_pass ? "validation PASS" : "validation FAIL") << "\n";
  return all_pass ? exit_ok : exit_validation_failure;
}

int run_dump_field(const RunConfig& cfg, std::ostream& log) {
  if (cfg.is_sweep())
    throw ConfigError("dump-field: scalar geometry required");
  const CrossSection cs =
      cfg.cross_section(cfg.major_radii[0], cfg.thicknesses[0]);
  ensure_outdir(cfg);
  const Grid grid = build_grid(cs, cfg.resolution, cfg.pml, cfg.lambda_target);
  {
    std::ofstream out(cfg.out_dir + "/grid.txt");
    dump_grid(grid, out);
  }
  for (Polarization pol : cfg.polarizations) {
    const FundamentalResult fr = find_fundamental(
        cs, pol, cfg.lambda_target, cfg.resolution, cfg.pml, cfg.solver);
    std::ofstream out(cfg.out_dir + "/field_" + polarization_name(pol) + ".txt");
    dump_field_text(fr.mode, grid, out);
    log << "field_" << polarization_name(pol) << ".txt written (m=" << fr.m
        << ", lambda_res=" << fmt(fr.mode.lambda_res) << ")\n";
  }
  return exit_ok;
}

} // namespace wgcav
