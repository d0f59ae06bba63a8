#include "becsim/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"

namespace becsim {

namespace c = constants;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool parse_int(const std::string& s, int* out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  if (v < -2147483647L || v > 2147483647L) return false;
  *out = static_cast<int>(v);
  return true;
}

bool parse_bool(const std::string& s, bool* out) {
  if (s == "true") {
    *out = true;
    return true;
  }
  if (s == "false") {
    *out = false;
    return true;
  }
  return false;
}

struct KeySpec {
  const char* name;
  bool required;
  std::function<bool(const std::string&, RunConfig&)> set;
};

const std::vector<KeySpec>& key_table() {
  auto d = [](double RunConfig::*field) {
    return [field](const std::string& v, RunConfig& c) {
      return parse_double(v, &(c.*field));
    };
  };
  auto i = [](int RunConfig::*field) {
    return [field](const std::string& v, RunConfig& c) {
      return parse_int(v, &(c.*field));
    };
  };
  auto b = [](bool RunConfig::*field) {
    return [field](const std::string& v, RunConfig& c) {
      return parse_bool(v, &(c.*field));
    };
  };
  auto s = [](std::string RunConfig::*field) {
    return [field](const std::string& v, RunConfig& c) {
      c.*field = v;
      return true;
    };
  };
  static const std::vector<KeySpec> table = {
      {"run", false, s(&RunConfig::run)},
      {"n_total", true, i(&RunConfig::n_total)},
      {"omega_x_hz", true, d(&RunConfig::omega_x_hz)},
      {"omega_y_hz", true, d(&RunConfig::omega_y_hz)},
      {"omega_z_hz", true, d(&RunConfig::omega_z_hz)},
      {"mass_amu", true, d(&RunConfig::mass_amu)},
      {"scattering_length_nm", true, d(&RunConfig::scattering_length_nm)},
      {"temperature_nk", true, d(&RunConfig::temperature_nk)},
      {"gamma_hz", true, d(&RunConfig::gamma_hz)},
      {"energy_cutoff_kbt", false, d(&RunConfig::energy_cutoff_kbt)},
      {"kernel_cutoff_kbt", false, d(&RunConfig::kernel_cutoff_kbt)},
      {"window_gamma", false, d(&RunConfig::window_gamma)},
      {"rate_mode", false, s(&RunConfig::rate_mode)},
      {"include_pair_rates", false, b(&RunConfig::include_pair_rates)},
      {"include_secondary_terms", false,
       b(&RunConfig::include_secondary_terms)},
      {"integrator", false, s(&RunConfig::integrator)},
      {"rel_tol", false, d(&RunConfig::rel_tol)},
      {"abs_tol", false, d(&RunConfig::abs_tol)},
      {"t_final_s", false, d(&RunConfig::t_final_s)},
      {"output_points", false, i(&RunConfig::output_points)},
      {"snapshot_stride", false, i(&RunConfig::snapshot_stride)},
      {"initial_state", false, s(&RunConfig::initial_state)},
      {"sweep_t_over_tc_min", false, d(&RunConfig::sweep_t_over_tc_min)},
      {"sweep_t_over_tc_max", false, d(&RunConfig::sweep_t_over_tc_max)},
      {"sweep_points", false, i(&RunConfig::sweep_points)},
      {"threads", false, i(&RunConfig::threads)},
      {"out_dir", false, s(&RunConfig::out_dir)},
  };
  return table;
}

void check_semantics(const RunConfig& cfg, std::vector<std::string>* bad) {
  if (cfg.rate_mode != "discrete" && cfg.rate_mode != "semiclassical")
    bad->push_back("rate_mode must be discrete or semiclassical, got '" +
                   cfg.rate_mode + "'");
  if (cfg.integrator != "rk45" && cfg.integrator != "bdf")
    bad->push_back("integrator must be rk45 or bdf, got '" + cfg.integrator +
                   "'");
  if (!cfg.run.empty() && cfg.run != "spectrum" && cfg.run != "rates" &&
      cfg.run != "evolve" && cfg.run != "steady" && cfg.run != "oracle" &&
      cfg.run != "sweep")
    bad->push_back("run must name a subcommand, got '" + cfg.run + "'");
  if (!(cfg.rel_tol > 0)) bad->push_back("rel_tol must be positive");
  if (!(cfg.abs_tol > 0)) bad->push_back("abs_tol must be positive");
  if (cfg.t_final_s < 0) bad->push_back("t_final_s must not be negative");
  if (cfg.output_points < 2)
    bad->push_back("output_points must be at least 2");
  if (cfg.snapshot_stride < 0)
    bad->push_back("snapshot_stride must not be negative");
  if (cfg.threads < 0) bad->push_back("threads must not be negative");
  if (cfg.sweep_points < 2) bad->push_back("sweep_points must be at least 2");
  if (!(cfg.sweep_t_over_tc_min > 0))
    bad->push_back("sweep_t_over_tc_min must be positive");
  if (!(cfg.sweep_t_over_tc_max > cfg.sweep_t_over_tc_min))
    bad->push_back("sweep_t_over_tc_max must exceed sweep_t_over_tc_min");
  if (!(cfg.energy_cutoff_kbt > 0))
    bad->push_back("energy_cutoff_kbt must be positive");
  if (!(cfg.kernel_cutoff_kbt > 0))
    bad->push_back("kernel_cutoff_kbt must be positive");
  if (!(cfg.window_gamma > 0)) bad->push_back("window_gamma must be positive");

  const std::string& init = cfg.initial_state;
  if (init != "zero" && init != "canonical") {
    int n0 = -1;
    if (init.rfind("delta:", 0) == 0 && parse_int(init.substr(6), &n0) &&
        n0 >= 0) {
      if (cfg.n_total > 0 && n0 > cfg.n_total)
        bad->push_back("initial_state delta:" + std::to_string(n0) +
                       " exceeds n_total");
    } else {
      bad->push_back(
          "initial_state must be zero, canonical or delta:<n0>, got '" +
          init + "'");
    }
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  const auto& table = key_table();
  std::vector<bool> seen(table.size(), false);
  std::vector<std::string> bad;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bad.push_back("line " + std::to_string(lineno) +
                    ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::size_t idx = table.size();
    for (std::size_t k = 0; k < table.size(); ++k) {
      if (key == table[k].name) {
        idx = k;
        break;
      }
    }
    if (idx == table.size()) {
      bad.push_back("unknown key '" + key + "'");
      continue;
    }
    if (seen[idx]) {
      bad.push_back("duplicate key '" + key + "'");
      continue;
    }
    seen[idx] = true;
    if (!table[idx].set(value, cfg))
      bad.push_back("invalid value for '" + key + "': '" + value + "'");
  }

  for (std::size_t k = 0; k < table.size(); ++k)
    if (table[k].required && !seen[k])
      bad.push_back(std::string("missing required key '") + table[k].name +
                    "'");

  check_semantics(cfg, &bad);
  if (!bad.empty()) throw ConfigError(bad);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot open config file '" + path + "'"));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

TrapModel make_trap(const RunConfig& cfg) {
  TrapModel t;
  t.omega_x = 2.0 * c::pi * cfg.omega_x_hz;
  t.omega_y = 2.0 * c::pi * cfg.omega_y_hz;
  t.omega_z = 2.0 * c::pi * cfg.omega_z_hz;
  t.mass = c::amu * cfg.mass_amu;
  t.scattering_length = 1e-9 * cfg.scattering_length_nm;
  t.temperature = 1e-9 * cfg.temperature_nk;
  t.gamma = cfg.gamma_hz;
  t.n_total = cfg.n_total;
  t.energy_cutoff = cfg.energy_cutoff_kbt;
  t.validate();
  return t;
}

RateOptions make_rate_options(const RunConfig& cfg) {
  RateOptions opt;
  opt.mode = cfg.rate_mode == "semiclassical" ? RateMode::semiclassical
                                              : RateMode::discrete;
  opt.window = cfg.window_gamma;
  opt.kernel_cutoff = cfg.kernel_cutoff_kbt;
  opt.include_secondary = cfg.include_secondary_terms;
  opt.threads = cfg.threads;
  return opt;
}

PropagateOptions make_propagate_options(const RunConfig& cfg) {
  PropagateOptions opt;
  opt.integrator =
      cfg.integrator == "bdf" ? Integrator::bdf : Integrator::rk45;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  opt.t_final = cfg.t_final_s;
  opt.output_points = cfg.output_points;
  opt.snapshot_stride = cfg.snapshot_stride;
  return opt;
}

}  // namespace becsim
