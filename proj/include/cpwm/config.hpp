#pragma once

#include "cpwm/potential.hpp"
#include "cpwm/trajgrid.hpp"
#include "cpwm/units.hpp"

#include <optional>
#include <string>

namespace cpwm {

//! Everything a single run needs, as parsed from a config file.
//! Energies are stored in hartree (cm-1 tagged values are converted at
//! parse time). Physical validation is delegated to build_grid_spec and
//! the potential factories; the parser only checks presence, syntax, and
//! that every key is known.
struct RunConfig {
  SchemeKind scheme = SchemeKind::constant_velocity;
  PotentialModel potential;
  double E = 0;
  double m = default_mass;
  int N = 0;
  double dt = 0; // requested step; the grid rounds it down to divide t_shift
  double x_L = 0, x_R = 0;
  double x0 = 0;    // dividing point (discontinuous) / ramp midpoint
  double beta = 0;  // effective-ramp steepness (ramp scheme only)
  std::optional<double> t_shift; // discontinuous scheme: override derived value
  double t_max = 0;
  int M = 5;
  std::optional<double> stationarity_tol;
  std::optional<int> snapshot_stride;
  std::string out_dir;
};

//! Parse `key = value` text with [potential] / [potential.term] sections.
//! base_dir resolves relative tabulated-potential file paths.
RunConfig parse_config_text(const std::string& text, const std::string& base_dir = "");

RunConfig load_config(const std::string& path);

//! Compact JSON object capturing the full run description; parsing it back
//! with config_from_echo yields an equivalent RunConfig (canonical form, so
//! echo(parse(echo(c))) == echo(c)).
std::string echo_params_json(const RunConfig& cfg);

RunConfig config_from_echo(const std::string& json_text);

} // namespace cpwm
