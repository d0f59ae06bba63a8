#pragma once

#include <string>

#include "becsim/kinetics.hpp"
#include "becsim/rates.hpp"
#include "becsim/trap.hpp"

namespace becsim {

// Run description parsed from a `key = value` file. Unknown keys, duplicate
// keys, malformed values and missing required keys are all collected and
// rejected together in one ConfigError. Lab-friendly units here; SI conversion
// happens in make_trap.
struct RunConfig {
  std::string run;  // optional; must match the CLI subcommand when set

  // required
  int n_total = 0;
  double omega_x_hz = 0;  // linear trap frequencies, Hz
  double omega_y_hz = 0;
  double omega_z_hz = 0;
  double mass_amu = 0;
  double scattering_length_nm = 0;
  double temperature_nk = 0;
  double gamma_hz = 0;  // bath correlation decay rate, 1/s (no 2*pi)

  // optional, with defaults
  double energy_cutoff_kbt = 12.0;
  double kernel_cutoff_kbt = 8.0;
  double window_gamma = 8.0;
  std::string rate_mode = "discrete";  // or semiclassical
  bool include_pair_rates = false;
  bool include_secondary_terms = false;
  std::string integrator = "rk45";  // or bdf
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  double t_final_s = 0;  // required by evolve only
  int output_points = 200;
  int snapshot_stride = 0;
  std::string initial_state = "zero";  // zero | canonical | delta:<n0>
  double sweep_t_over_tc_min = 0.2;
  double sweep_t_over_tc_max = 1.2;
  int sweep_points = 11;
  int threads = 0;  // 0 = all hardware threads
  std::string out_dir = ".";
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

TrapModel make_trap(const RunConfig& config);
RateOptions make_rate_options(const RunConfig& config);
PropagateOptions make_propagate_options(const RunConfig& config);

}  // namespace becsim
