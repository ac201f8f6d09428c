#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgcav/eigensolver.hpp"
#include "wgcav/qed.hpp"

namespace wgcav {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run description loaded from a single JSON document. Unknown keys are
/// rejected; lengths accept m/mm/um/nm suffixes and are normalized to meters.
struct RunConfig {
  enum class Variant { CoatedToroid, CoatedSphere, Cylinder };

  Variant variant = Variant::CoatedToroid;
  std::vector<double> major_radii;   // R (toroid) or a (sphere/cylinder)
  double minor_radius = 0.0;         // toroid R'
  std::vector<double> thicknesses;   // t sweep values

  std::array<Medium, 3> media;       // core, coating, exterior
  double lambda_target = 637e-9;
  std::vector<Polarization> polarizations;

  DipoleParams dipole;
  std::optional<double> embedding_eps;

  ResolutionSpec resolution;
  PmlSpec pml;
  SolveOptions solver;
  int max_workers = 1;

  double validate_lambda_tol = 1e-3;
  double validate_log10_q_tol = 0.5;

  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  bool field_dump = false;

  std::string config_hash;

  bool is_sweep() const { return major_radii.size() > 1 || thicknesses.size() > 1; }
  CrossSection cross_section(double R, double t) const;
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// FNV-1a over the canonicalized config document.
std::string hash_text(const std::string& text);

/// "4um" / "150nm" / bare number (meters) -> meters.
double parse_length(const std::string& text);

} // namespace wgcav
