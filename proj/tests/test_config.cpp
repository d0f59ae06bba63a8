#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "becsim/config.hpp"
#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "doctest.h"

using namespace becsim;
namespace c = becsim::constants;

namespace {

const char* kMinimal =
    "n_total = 6\n"
    "omega_x_hz = 100.0\n"
    "omega_y_hz = 230.0\n"
    "omega_z_hz = 300.0\n"
    "mass_amu = 86.909180527\n"
    "scattering_length_nm = 5.7\n"
    "temperature_nk = 20.0\n"
    "gamma_hz = 20.0\n";

bool mentions(const std::vector<std::string>& violations,
              const std::string& needle) {
  for (const std::string& v : violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("a minimal file parses with the documented defaults") {
  RunConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.n_total == 6);
  CHECK(cfg.omega_y_hz == 230.0);
  CHECK(cfg.run.empty());
  CHECK(cfg.energy_cutoff_kbt == 12.0);
  CHECK(cfg.kernel_cutoff_kbt == 8.0);
  CHECK(cfg.window_gamma == 8.0);
  CHECK(cfg.rate_mode == "discrete");
  CHECK(cfg.include_pair_rates == false);
  CHECK(cfg.include_secondary_terms == false);
  CHECK(cfg.integrator == "rk45");
  CHECK(cfg.rel_tol == 1e-8);
  CHECK(cfg.abs_tol == 1e-13);
  CHECK(cfg.t_final_s == 0.0);
  CHECK(cfg.output_points == 200);
  CHECK(cfg.snapshot_stride == 0);
  CHECK(cfg.initial_state == "zero");
  CHECK(cfg.sweep_t_over_tc_min == 0.2);
  CHECK(cfg.sweep_t_over_tc_max == 1.2);
  CHECK(cfg.sweep_points == 11);
  CHECK(cfg.threads == 0);
  CHECK(cfg.out_dir == ".");
}

TEST_CASE("comments, spacing and compact assignments are tolerated") {
  RunConfig cfg = parse_config_text(
      "# full-line comment\n"
      "\n"
      "n_total=6\n"
      "  omega_x_hz =   100.0   # trailing comment\n"
      "omega_y_hz = 230.0\n"
      "omega_z_hz = 300.0\n"
      "mass_amu = 86.909180527\n"
      "scattering_length_nm = 5.7\n"
      "temperature_nk = 20.0\n"
      "gamma_hz = 20.0\n"
      "run = steady\n");
  CHECK(cfg.omega_x_hz == 100.0);
  CHECK(cfg.run == "steady");
}

TEST_CASE("every violation is reported in one throw") {
  const std::string text =
      "n_total = 6\n"
      "n_total = 7\n"
      "bogus = 1\n"
      "omega_x_hz = abc\n"
      "omega_y_hz = 230.0\n"
      "omega_z_hz = 300.0\n"
      "mass_amu = 86.909180527\n"
      "scattering_length_nm = 5.7\n"
      "rate_mode = frobnicate\n"
      "just some words\n";
  try {
    parse_config_text(text);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::vector<std::string>& v = e.violations();
    CHECK(v.size() >= 7);
    CHECK(mentions(v, "duplicate key 'n_total'"));
    CHECK(mentions(v, "unknown key 'bogus'"));
    CHECK(mentions(v, "invalid value for 'omega_x_hz': 'abc'"));
    CHECK(mentions(v, "missing required key 'temperature_nk'"));
    CHECK(mentions(v, "missing required key 'gamma_hz'"));
    CHECK(mentions(v, "rate_mode must be discrete or semiclassical"));
    CHECK(mentions(v, "line 10: expected key = value"));
    // a malformed value still counts as present, not missing
    CHECK(!mentions(v, "missing required key 'omega_x_hz'"));
  }
}

TEST_CASE("semantic bounds are enforced together") {
  const std::string text = std::string(kMinimal) +
                           "rel_tol = 0\n"
                           "abs_tol = -1e-9\n"
                           "output_points = 1\n"
                           "snapshot_stride = -2\n"
                           "threads = -1\n"
                           "sweep_points = 1\n"
                           "sweep_t_over_tc_min = 0.9\n"
                           "sweep_t_over_tc_max = 0.3\n"
                           "window_gamma = 0\n"
                           "kernel_cutoff_kbt = -4\n"
                           "energy_cutoff_kbt = 0\n"
                           "integrator = verlet\n";
  try {
    parse_config_text(text);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::vector<std::string>& v = e.violations();
    CHECK(v.size() == 11);
    CHECK(mentions(v, "rel_tol must be positive"));
    CHECK(mentions(v, "abs_tol must be positive"));
    CHECK(mentions(v, "output_points must be at least 2"));
    CHECK(mentions(v, "snapshot_stride must not be negative"));
    CHECK(mentions(v, "threads must not be negative"));
    CHECK(mentions(v, "sweep_points must be at least 2"));
    CHECK(mentions(v, "sweep_t_over_tc_max must exceed"));
    CHECK(mentions(v, "window_gamma must be positive"));
    CHECK(mentions(v, "kernel_cutoff_kbt must be positive"));
    CHECK(mentions(v, "energy_cutoff_kbt must be positive"));
    CHECK(mentions(v, "integrator must be rk45 or bdf"));
    CHECK(mentions(v, "sweep_t_over_tc_min"));
  }
}

TEST_CASE("initial state grammar covers its three forms") {
  RunConfig cfg =
      parse_config_text(std::string(kMinimal) + "initial_state = delta:3\n");
  CHECK(cfg.initial_state == "delta:3");
  cfg = parse_config_text(std::string(kMinimal) + "initial_state = canonical\n");
  CHECK(cfg.initial_state == "canonical");

  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                    "initial_state = delta:9\n"),
                  ConfigError);  // exceeds n_total = 6
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                    "initial_state = delta:-1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                    "initial_state = delta:abc\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                    "initial_state = thermal\n"),
                  ConfigError);
}

TEST_CASE("run key must name a subcommand") {
  for (const char* name :
       {"spectrum", "rates", "evolve", "steady", "oracle", "sweep"}) {
    RunConfig cfg = parse_config_text(std::string(kMinimal) + "run = " +
                                      name + "\n");
    CHECK(cfg.run == name);
  }
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) + "run = fly\n"),
                  ConfigError);
}

TEST_CASE("booleans accept only their two literals") {
  RunConfig cfg = parse_config_text(std::string(kMinimal) +
                                    "include_pair_rates = true\n"
                                    "include_secondary_terms = false\n");
  CHECK(cfg.include_pair_rates == true);
  CHECK(cfg.include_secondary_terms == false);
  CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                    "include_pair_rates = yes\n"),
                  ConfigError);
}

TEST_CASE("lab units convert to si in the trap model") {
  RunConfig cfg = parse_config_text(kMinimal);
  TrapModel trap = make_trap(cfg);
  CHECK(trap.omega_x == doctest::Approx(2.0 * c::pi * 100.0).epsilon(1e-15));
  CHECK(trap.omega_z == doctest::Approx(2.0 * c::pi * 300.0).epsilon(1e-15));
  CHECK(trap.mass == doctest::Approx(86.909180527 * c::amu).epsilon(1e-15));
  CHECK(trap.scattering_length == doctest::Approx(5.7e-9).epsilon(1e-15));
  CHECK(trap.temperature == doctest::Approx(20.0e-9).epsilon(1e-15));
  CHECK(trap.gamma == 20.0);
  CHECK(trap.n_total == 6);
  CHECK(trap.energy_cutoff == 12.0);
}

TEST_CASE("trap validation collects every out-of-range field") {
  RunConfig cfg = parse_config_text(kMinimal);
  cfg.omega_x_hz = -5.0;
  cfg.mass_amu = 0.0;
  cfg.temperature_nk = -1.0;
  try {
    make_trap(cfg);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() >= 3);
  }
}

TEST_CASE("option builders map the remaining fields") {
  RunConfig cfg = parse_config_text(std::string(kMinimal) +
                                    "rate_mode = semiclassical\n"
                                    "window_gamma = 5.5\n"
                                    "kernel_cutoff_kbt = 7.25\n"
                                    "include_secondary_terms = true\n"
                                    "threads = 3\n"
                                    "integrator = bdf\n"
                                    "rel_tol = 1e-7\n"
                                    "abs_tol = 1e-12\n"
                                    "t_final_s = 2.5\n"
                                    "output_points = 33\n"
                                    "snapshot_stride = 4\n");
  RateOptions ro = make_rate_options(cfg);
  CHECK(ro.mode == RateMode::semiclassical);
  CHECK(ro.window == 5.5);
  CHECK(ro.kernel_cutoff == 7.25);
  CHECK(ro.include_secondary == true);
  CHECK(ro.threads == 3);
  PropagateOptions po = make_propagate_options(cfg);
  CHECK(po.integrator == Integrator::bdf);
  CHECK(po.rel_tol == 1e-7);
  CHECK(po.abs_tol == 1e-12);
  CHECK(po.t_final == 2.5);
  CHECK(po.output_points == 33);
  CHECK(po.snapshot_stride == 4);
}

TEST_CASE("file loading reports the path it cannot open") {
  try {
    parse_config("definitely_not_here_9301.ini");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.violations(), "definitely_not_here_9301.ini"));
  }

  const std::string path = "config_roundtrip_tmp.ini";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  RunConfig from_file = parse_config(path);
  CHECK(from_file.n_total == 6);
  CHECK(from_file.gamma_hz == 20.0);
  std::remove(path.c_str());
}
