#include "wgcav/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wgcav {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + where + "." + it.key() + "'");
}

double length_from(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_length(v.get<std::string>());
  throw ConfigError("config: " + field + " must be a number (meters) or a "
                    "length string like \"4um\"");
}

std::vector<double> length_list_from(const json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_array()) {
    if (v.empty()) throw ConfigError("config: " + field + " sweep list is empty");
    for (const auto& e : v) out.push_back(length_from(e, field));
  } else {
    out.push_back(length_from(v, field));
  }
  return out;
}

Medium medium_from(const json& j, const std::string& where) {
  reject_unknown_keys(j, {"name", "n", "bulk_loss_dB_per_cm"}, where);
  if (!j.contains("n"))
    throw ConfigError("config: " + where + ".n is required");
  Medium m;
  m.name = j.value("name", where);
  m.n = j.at("n").get<double>();
  m.bulk_loss_db_per_cm = j.value("bulk_loss_dB_per_cm", 0.0);
  if (m.n < 1.0) throw ConfigError("config: " + where + ".n must be >= 1");
  if (m.bulk_loss_db_per_cm < 0.0)
    throw ConfigError("config: " + where + ".bulk_loss_dB_per_cm must be >= 0");
  return m;
}

} // namespace

double parse_length(const std::string& text) {
  size_t pos = 0;
  double value;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse length '" + text + "'");
  }
  std::string suffix = text.substr(pos);
  while (!suffix.empty() && suffix.front() == ' ') suffix.erase(suffix.begin());
  if (suffix.empty() || suffix == "m") return value;
  if (suffix == "mm") return value * 1e-3;
  if (suffix == "cm") return value * 1e-2;
  if (suffix == "um" || suffix == "µm" || suffix == "μm")
    return value * 1e-6;
  if (suffix == "nm") return value * 1e-9;
  throw ConfigError("config: unknown length unit '" + suffix + "' in '" + text + "'");
}

std::string hash_text(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CrossSection RunConfig::cross_section(double R, double t) const {
  switch (variant) {
    case Variant::CoatedToroid:
      return CrossSection(CoatedToroid{R, minor_radius, t}, media);
    case Variant::CoatedSphere:
      return CrossSection(CoatedSphere{R, t}, media);
    case Variant::Cylinder:
      return CrossSection(Cylinder{R}, media);
  }
  throw std::logic_error("bad variant");
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  reject_unknown_keys(
      j, {"geometry", "materials", "target", "dipole", "solver", "validate",
          "output"},
      "<root>");

  RunConfig cfg;

  // ---- geometry ----
  if (!j.contains("geometry")) throw ConfigError("config: geometry is required");
  {
    const json& g = j.at("geometry");
    reject_unknown_keys(g, {"variant", "R", "R_minor", "a", "t"}, "geometry");
    const std::string variant = g.value("variant", "");
    if (variant == "coated_toroid") {
      cfg.variant = RunConfig::Variant::CoatedToroid;
      if (!g.contains("R") || !g.contains("R_minor"))
        throw ConfigError("config: geometry.R and geometry.R_minor are required");
      cfg.major_radii = length_list_from(g.at("R"), "geometry.R");
      cfg.minor_radius = length_from(g.at("R_minor"), "geometry.R_minor");
      cfg.thicknesses = g.contains("t")
                            ? length_list_from(g.at("t"), "geometry.t")
                            : std::vector<double>{0.0};
    } else if (variant == "coated_sphere") {
      cfg.variant = RunConfig::Variant::CoatedSphere;
      if (!g.contains("a"))
        throw ConfigError("config: geometry.a is required for coated_sphere");
      cfg.major_radii = length_list_from(g.at("a"), "geometry.a");
      cfg.thicknesses = g.contains("t")
                            ? length_list_from(g.at("t"), "geometry.t")
                            : std::vector<double>{0.0};
    } else if (variant == "cylinder") {
      cfg.variant = RunConfig::Variant::Cylinder;
      if (!g.contains("a"))
        throw ConfigError("config: geometry.a is required for cylinder");
      cfg.major_radii = length_list_from(g.at("a"), "geometry.a");
      cfg.thicknesses = {0.0};
    } else {
      throw ConfigError("config: geometry.variant must be one of coated_toroid, "
                        "coated_sphere, cylinder");
    }
  }

  // ---- materials ----
  if (!j.contains("materials")) throw ConfigError("config: materials is required");
  {
    const json& m = j.at("materials");
    reject_unknown_keys(m, {"core", "coating", "exterior"}, "materials");
    for (const char* key : {"core", "coating", "exterior"})
      if (!m.contains(key))
        throw ConfigError(std::string("config: materials.") + key + " is required");
    cfg.media = {medium_from(m.at("core"), "materials.core"),
                 medium_from(m.at("coating"), "materials.coating"),
                 medium_from(m.at("exterior"), "materials.exterior")};
  }

  // ---- target ----
  if (!j.contains("target")) throw ConfigError("config: target is required");
  {
    const json& t = j.at("target");
    reject_unknown_keys(t, {"lambda", "polarizations"}, "target");
    if (!t.contains("lambda"))
      throw ConfigError("config: target.lambda is required");
    cfg.lambda_target = length_from(t.at("lambda"), "target.lambda");
    if (cfg.lambda_target <= 0.0)
      throw ConfigError("config: target.lambda must be positive");
    if (t.contains("polarizations")) {
      for (const auto& p : t.at("polarizations")) {
        const std::string s = p.get<std::string>();
        if (s == "TE") cfg.polarizations.push_back(Polarization::QuasiTE);
        else if (s == "TM") cfg.polarizations.push_back(Polarization::QuasiTM);
        else throw ConfigError("config: target.polarizations entries must be TE or TM");
      }
    }
    if (cfg.polarizations.empty())
      cfg.polarizations = {Polarization::QuasiTE, Polarization::QuasiTM};
  }

  // ---- dipole ----
  {
    cfg.dipole = DipoleParams{};
    if (j.contains("dipole")) {
      const json& d = j.at("dipole");
      reject_unknown_keys(d,
                          {"mu_C_m", "gamma_vac_over_2pi_Hz", "lambda0",
                           "epsilon_nv", "embedding_eps"},
                          "dipole");
      cfg.dipole.mu = d.value("mu_C_m", cfg.dipole.mu);
      cfg.dipole.gamma_vac_over_2pi =
          d.value("gamma_vac_over_2pi_Hz", cfg.dipole.gamma_vac_over_2pi);
      if (d.contains("lambda0"))
        cfg.dipole.lambda0 = length_from(d.at("lambda0"), "dipole.lambda0");
      if (d.contains("epsilon_nv"))
        cfg.dipole.epsilon_nv = d.at("epsilon_nv").get<double>();
      if (d.contains("embedding_eps"))
        cfg.embedding_eps = d.at("embedding_eps").get<double>();
    }
    if (cfg.dipole.epsilon_nv <= 0.0)
      throw ConfigError(
          "config: dipole.epsilon_nv is required (no default exists)");
  }

  // ---- solver ----
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown_keys(s, {"resolution", "pml", "eig", "max_workers"}, "solver");
    if (s.contains("resolution")) {
      const json& r = s.at("resolution");
      reject_unknown_keys(r,
                          {"base_cells_per_wavelength", "min_cells_across_coating",
                           "window_padding", "max_grading_ratio",
                           "interface_refinement", "max_cells_per_axis"},
                          "solver.resolution");
      cfg.resolution.base_cells_per_wavelength =
          r.value("base_cells_per_wavelength", cfg.resolution.base_cells_per_wavelength);
      cfg.resolution.min_cells_across_coating =
          r.value("min_cells_across_coating", cfg.resolution.min_cells_across_coating);
      if (r.contains("window_padding"))
        cfg.resolution.window_padding =
            length_from(r.at("window_padding"), "solver.resolution.window_padding");
      cfg.resolution.max_grading_ratio =
          r.value("max_grading_ratio", cfg.resolution.max_grading_ratio);
      cfg.resolution.interface_refinement =
          r.value("interface_refinement", cfg.resolution.interface_refinement);
      cfg.resolution.max_cells_per_axis =
          r.value("max_cells_per_axis", cfg.resolution.max_cells_per_axis);
    }
    if (s.contains("pml")) {
      const json& p = s.at("pml");
      reject_unknown_keys(p, {"thickness_cells", "profile_order", "max_stretch_imag"},
                          "solver.pml");
      cfg.pml.thickness_cells = p.value("thickness_cells", cfg.pml.thickness_cells);
      cfg.pml.profile_order = p.value("profile_order", cfg.pml.profile_order);
      cfg.pml.max_stretch_imag =
          p.value("max_stretch_imag", cfg.pml.max_stretch_imag);
    }
    if (s.contains("eig")) {
      const json& e = s.at("eig");
      reject_unknown_keys(e,
                          {"count", "residual_tol", "krylov_dim", "max_restarts",
                           "divergence_tol", "dense_threshold", "polish",
                           "polish_iterations"},
                          "solver.eig");
      cfg.solver.count = e.value("count", cfg.solver.count);
      cfg.solver.residual_tol = e.value("residual_tol", cfg.solver.residual_tol);
      cfg.solver.krylov_dim = e.value("krylov_dim", cfg.solver.krylov_dim);
      cfg.solver.max_restarts = e.value("max_restarts", cfg.solver.max_restarts);
      cfg.solver.divergence_tol =
          e.value("divergence_tol", cfg.solver.divergence_tol);
      cfg.solver.dense_threshold =
          e.value("dense_threshold", cfg.solver.dense_threshold);
      cfg.solver.polish = e.value("polish", cfg.solver.polish);
      cfg.solver.polish_iterations =
          e.value("polish_iterations", cfg.solver.polish_iterations);
    }
    cfg.max_workers = s.value("max_workers", cfg.max_workers);
    if (cfg.max_workers < 1)
      throw ConfigError("config: solver.max_workers must be >= 1");
  }

  // ---- validate ----
  if (j.contains("validate")) {
    const json& v = j.at("validate");
    reject_unknown_keys(v, {"lambda_tolerance", "log10_q_tolerance"}, "validate");
    cfg.validate_lambda_tol = v.value("lambda_tolerance", cfg.validate_lambda_tol);
    cfg.validate_log10_q_tol =
        v.value("log10_q_tolerance", cfg.validate_log10_q_tol);
  }

  // ---- output ----
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown_keys(o, {"directory", "formats", "field_dump"}, "output");
    cfg.out_dir = o.value("directory", cfg.out_dir);
    if (o.contains("formats")) {
      cfg.write_csv = false;
      cfg.write_json = false;
      for (const auto& f : o.at("formats")) {
        const std::string s = f.get<std::string>();
        if (s == "csv") cfg.write_csv = true;
        else if (s == "json") cfg.write_json = true;
        else throw ConfigError("config: output.formats entries must be csv or json");
      }
    }
    cfg.field_dump = o.value("field_dump", cfg.field_dump);
  }

  // geometry sanity against the cross-section constructor
  for (double R : cfg.major_radii)
    for (double t : cfg.thicknesses) {
      try {
        (void)cfg.cross_section(R, t);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: geometry invalid: ") + e.what());
      }
    }

  cfg.config_hash = hash_text(j.dump());
  // deterministic eigensolver start vector, seeded from the config hash
  cfg.solver.seed = std::stoull(cfg.config_hash, nullptr, 16);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

} // namespace wgcav
