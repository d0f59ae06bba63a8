#include "becsim/runner.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "becsim/canonical.hpp"
#include "becsim/constants.hpp"
#include "becsim/csv.hpp"
#include "becsim/errors.hpp"
#include "becsim/kinetics.hpp"
#include "becsim/oracle.hpp"
#include "becsim/overlap.hpp"
#include "becsim/rates.hpp"
#include "becsim/spectrum.hpp"
#include "json.hpp"

namespace becsim {

namespace fs = std::filesystem;
namespace c = constants;
using nlohmann::json;

namespace {

const char* engine_version = "0.1.0";

json echo_config(const RunConfig& cfg) {
  json j;
  j["run"] = cfg.run;
  j["n_total"] = cfg.n_total;
  j["omega_x_hz"] = cfg.omega_x_hz;
  j["omega_y_hz"] = cfg.omega_y_hz;
  j["omega_z_hz"] = cfg.omega_z_hz;
  j["mass_amu"] = cfg.mass_amu;
  j["scattering_length_nm"] = cfg.scattering_length_nm;
  j["temperature_nk"] = cfg.temperature_nk;
  j["gamma_hz"] = cfg.gamma_hz;
  j["energy_cutoff_kbt"] = cfg.energy_cutoff_kbt;
  j["kernel_cutoff_kbt"] = cfg.kernel_cutoff_kbt;
  j["window_gamma"] = cfg.window_gamma;
  j["rate_mode"] = cfg.rate_mode;
  j["include_pair_rates"] = cfg.include_pair_rates;
  j["include_secondary_terms"] = cfg.include_secondary_terms;
  j["integrator"] = cfg.integrator;
  j["rel_tol"] = cfg.rel_tol;
  j["abs_tol"] = cfg.abs_tol;
  j["t_final_s"] = cfg.t_final_s;
  j["output_points"] = cfg.output_points;
  j["snapshot_stride"] = cfg.snapshot_stride;
  j["initial_state"] = cfg.initial_state;
  j["sweep_t_over_tc_min"] = cfg.sweep_t_over_tc_min;
  j["sweep_t_over_tc_max"] = cfg.sweep_t_over_tc_max;
  j["sweep_points"] = cfg.sweep_points;
  j["threads"] = cfg.threads;
  j["out_dir"] = cfg.out_dir;
  return j;
}

Distribution initial_distribution(const RunConfig& cfg,
                                  const SpectrumTable& spectrum,
                                  const TrapModel& trap) {
  Distribution d;
  d.p.assign(static_cast<std::size_t>(trap.n_total) + 1, 0.0);
  if (cfg.initial_state == "zero") {
    d.p[0] = 1.0;
  } else if (cfg.initial_state == "canonical") {
    const CanonicalTable table =
        canonical_partition_table(spectrum, trap.n_total, trap.temperature);
    d = thermal_marginal(spectrum, table, trap.n_total).dist;
  } else {
    const int n0 = std::stoi(cfg.initial_state.substr(6));
    if (n0 > trap.n_total)
      throw ConfigError(std::string("initial_state exceeds n_total"));
    d.p[static_cast<std::size_t>(n0)] = 1.0;
  }
  return d;
}

void write_rates_csv(const std::string& path, const RateTable& t) {
  CsvWriter csv(path);
  std::vector<std::string> cols = {"n0",       "n_perp",  "lambda_plus",
                                   "lambda_minus", "xi_plus", "xi_minus"};
  if (t.has_pair_rates()) {
    cols.push_back("gamma_plus");
    cols.push_back("gamma_minus");
  }
  cols.push_back("mu_perp_joule");
  csv.header(cols);
  for (int n0 = 0; n0 <= t.n_total; ++n0) {
    const std::size_t np = static_cast<std::size_t>(t.n_total - n0);
    std::vector<std::string> cells = {
        CsvWriter::cell(n0),
        CsvWriter::cell(t.n_total - n0),
        CsvWriter::cell(t.lambda_plus[np]),
        CsvWriter::cell(t.lambda_minus[np]),
        CsvWriter::cell(t.xi_plus[n0]),
        CsvWriter::cell(t.xi_minus[n0])};
    if (t.has_pair_rates()) {
      cells.push_back(CsvWriter::cell(t.gamma_plus[n0]));
      cells.push_back(CsvWriter::cell(t.gamma_minus[n0]));
    }
    cells.push_back(CsvWriter::cell(t.mu_perp[np]));
    csv.row(cells);
  }
}

void write_profiles_csv(const std::string& path, const RateTable& t,
                        double beta) {
  CsvWriter csv(path);
  csv.header({"n_perp", "alpha", "mu_perp_joule"});
  for (std::size_t np = 0; np < t.mu_perp.size(); ++np) {
    csv.row({CsvWriter::cell(static_cast<long long>(np)),
             CsvWriter::cell(-beta * t.mu_perp[np]),
             CsvWriter::cell(t.mu_perp[np])});
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          int n_total, bool with_snapshots) {
  CsvWriter csv(path);
  std::vector<std::string> cols = {"time_s", "mean_n0", "std_n0"};
  if (with_snapshots)
    for (int i = 0; i <= n_total; ++i) cols.push_back("p_" + std::to_string(i));
  csv.header(cols);
  std::size_t snap = 0;
  for (std::size_t row = 0; row < traj.times.size(); ++row) {
    std::vector<std::string> cells = {CsvWriter::cell(traj.times[row]),
                                      CsvWriter::cell(traj.mean[row]),
                                      CsvWriter::cell(traj.stddev[row])};
    if (with_snapshots) {
      const bool has = snap < traj.snapshot_rows.size() &&
                       traj.snapshot_rows[snap] == row;
      for (int i = 0; i <= n_total; ++i)
        cells.push_back(has ? CsvWriter::cell(traj.snapshots[snap][i])
                            : std::string());
      if (has) ++snap;
    }
    csv.row(cells);
  }
}

void write_steady_csv(const std::string& path, const Distribution& steady,
                      const Distribution& oracle) {
  CsvWriter csv(path);
  csv.header({"n0", "p_steady", "p_canonical_oracle"});
  for (std::size_t i = 0; i < steady.p.size(); ++i)
    csv.row({CsvWriter::cell(static_cast<long long>(i)),
             CsvWriter::cell(steady.p[i]), CsvWriter::cell(oracle.p[i])});
}

void write_oracle_csv(const std::string& path, const Distribution& oracle) {
  CsvWriter csv(path);
  csv.header({"n0", "p_canonical_oracle"});
  for (std::size_t i = 0; i < oracle.p.size(); ++i)
    csv.row({CsvWriter::cell(static_cast<long long>(i)),
             CsvWriter::cell(oracle.p[i])});
}

void write_sweep_csv(const std::string& path,
                     const std::vector<CondensatePoint>& points) {
  CsvWriter csv(path);
  csv.header({"t_kelvin", "t_over_tc", "mean_fraction_oracle", "std_oracle",
              "mean_fraction_kinetics", "std_kinetics"});
  for (const auto& pt : points)
    csv.row({CsvWriter::cell(pt.temperature), CsvWriter::cell(pt.t_over_tc),
             CsvWriter::cell(pt.mean_fraction_oracle),
             CsvWriter::cell(pt.std_oracle),
             CsvWriter::cell(pt.mean_fraction_kinetics),
             CsvWriter::cell(pt.std_kinetics)});
}

}  // namespace

RunResult run(const RunConfig& cfg, const std::string& sub) {
  if (sub != "spectrum" && sub != "rates" && sub != "evolve" &&
      sub != "steady" && sub != "oracle" && sub != "sweep")
    throw ConfigError(std::string("unknown subcommand '" + sub + "'"));
  if (!cfg.run.empty() && cfg.run != sub)
    throw ConfigError(std::string("config sets run = " + cfg.run +
                       " but the subcommand is " + sub));
  if (sub == "evolve" && !(cfg.t_final_s > 0))
    throw ConfigError(std::string("evolve requires t_final_s > 0"));

  const TrapModel trap = make_trap(cfg);
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw ConfigError(std::string("cannot create output directory '" + cfg.out_dir +
                       "': " + ec.message()));

  const SpectrumTable spectrum = enumerate_modes(trap);

  json manifest;
  manifest["engine"] = {{"name", "becsim"}, {"version", engine_version}};
  manifest["command"] = sub;
  manifest["config"] = echo_config(cfg);
  const double tc = critical_temperature(trap);
  manifest["derived"] = {
      {"beta_hbar_gamma", trap.beta() * c::hbar * trap.gamma},
      {"critical_temperature_kelvin", tc},
      {"ground_energy_joule", trap.ground_energy()},
      {"interaction_ratio", trap.interaction_ratio()},
      {"mode_count", spectrum.size()},
      {"t_over_tc", trap.temperature / tc},
  };

  RunResult result;
  auto emit = [&](const std::string& name,
                  const std::function<void(const std::string&)>& writer) {
    const std::string path = (fs::path(cfg.out_dir) / name).string();
    writer(path);
    manifest["outputs"][name] = {
        {"bytes", static_cast<std::uint64_t>(fs::file_size(path))},
        {"fnv1a64", fnv1a64_file(path)}};
    result.outputs.push_back(path);
  };

  if (sub == "spectrum") {
    emit("spectrum.csv", [&](const std::string& p) {
      write_spectrum_csv(p, spectrum, trap.temperature);
    });
  } else if (sub == "rates" || sub == "evolve" || sub == "steady") {
    const OverlapTable overlaps(trap, spectrum);
    const RateTable table = build_rate_table(
        trap, spectrum, overlaps, make_rate_options(cfg),
        cfg.include_pair_rates);
    if (sub == "rates") {
      emit("rates.csv",
           [&](const std::string& p) { write_rates_csv(p, table); });
      emit("profiles.csv", [&](const std::string& p) {
        write_profiles_csv(p, table, trap.beta());
      });
    } else if (sub == "evolve") {
      const Distribution start = initial_distribution(cfg, spectrum, trap);
      const Trajectory traj =
          propagate(table, start, make_propagate_options(cfg));
      emit("trajectory.csv", [&](const std::string& p) {
        write_trajectory_csv(p, traj, trap.n_total, cfg.snapshot_stride > 0);
      });
    } else {
      const Distribution steady = steady_state(table);
      const CanonicalTable partition = canonical_partition_table(
          spectrum, trap.n_total, trap.temperature);
      const Distribution oracle =
          thermal_marginal(spectrum, partition, trap.n_total).dist;
      emit("steady.csv", [&](const std::string& p) {
        write_steady_csv(p, steady, oracle);
      });
    }
  } else if (sub == "oracle") {
    const CanonicalTable partition =
        canonical_partition_table(spectrum, trap.n_total, trap.temperature);
    const Distribution oracle =
        thermal_marginal(spectrum, partition, trap.n_total).dist;
    emit("oracle.csv",
         [&](const std::string& p) { write_oracle_csv(p, oracle); });
  } else {
    SweepOptions sweep;
    sweep.rates = make_rate_options(cfg);
    sweep.t_over_tc.resize(cfg.sweep_points);
    for (int i = 0; i < cfg.sweep_points; ++i)
      sweep.t_over_tc[i] =
          cfg.sweep_t_over_tc_min +
          (cfg.sweep_t_over_tc_max - cfg.sweep_t_over_tc_min) *
              static_cast<double>(i) / (cfg.sweep_points - 1);
    const std::vector<CondensatePoint> points =
        condensate_curves(trap, sweep);
    emit("sweep.csv",
         [&](const std::string& p) { write_sweep_csv(p, points); });
  }

  const std::string manifest_path =
      (fs::path(cfg.out_dir) / "manifest.json").string();
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out)
    throw NumericError("cannot write manifest '" + manifest_path + "'");
  out << manifest.dump(2) << "\n";
  out.close();
  result.outputs.push_back(manifest_path);
  return result;
}

}  // namespace becsim
