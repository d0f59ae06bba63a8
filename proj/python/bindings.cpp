#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "becsim/canonical.hpp"
#include "becsim/config.hpp"
#include "becsim/errors.hpp"
#include "becsim/kinetics.hpp"
#include "becsim/oracle.hpp"
#include "becsim/overlap.hpp"
#include "becsim/rates.hpp"
#include "becsim/runner.hpp"
#include "becsim/spectrum.hpp"
#include "becsim/trap.hpp"

namespace py = pybind11;
using namespace becsim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "condensate formation kinetics in harmonic traps";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericError>(m, "NumericError");
  py::register_exception<StructuralError>(m, "StructuralError");

  py::enum_<RateMode>(m, "RateMode")
      .value("discrete", RateMode::discrete)
      .value("semiclassical", RateMode::semiclassical);
  py::enum_<Integrator>(m, "Integrator")
      .value("rk45", Integrator::rk45)
      .value("bdf", Integrator::bdf);

  py::class_<TrapModel>(m, "TrapModel")
      .def(py::init<>())
      .def_readwrite("omega_x", &TrapModel::omega_x)
      .def_readwrite("omega_y", &TrapModel::omega_y)
      .def_readwrite("omega_z", &TrapModel::omega_z)
      .def_readwrite("mass", &TrapModel::mass)
      .def_readwrite("scattering_length", &TrapModel::scattering_length)
      .def_readwrite("temperature", &TrapModel::temperature)
      .def_readwrite("gamma", &TrapModel::gamma)
      .def_readwrite("n_total", &TrapModel::n_total)
      .def_readwrite("energy_cutoff", &TrapModel::energy_cutoff)
      .def("validate", &TrapModel::validate)
      .def("beta", &TrapModel::beta)
      .def("ground_energy", &TrapModel::ground_energy)
      .def("mean_omega", &TrapModel::mean_omega)
      .def("coupling", &TrapModel::coupling)
      .def("interaction_ratio", &TrapModel::interaction_ratio);
  m.def("kinetic_gamma_estimate", &kinetic_gamma_estimate,
        py::arg("scattering_length"), py::arg("density"),
        py::arg("temperature"), py::arg("mass"));

  py::class_<Mode>(m, "Mode")
      .def_readonly("nx", &Mode::nx)
      .def_readonly("ny", &Mode::ny)
      .def_readonly("nz", &Mode::nz)
      .def_readonly("energy", &Mode::energy);

  py::class_<SpectrumTable>(m, "SpectrumTable")
      .def_readonly("modes", &SpectrumTable::modes)
      .def_readonly("ground_energy", &SpectrumTable::ground_energy)
      .def_readonly("cutoff_energy", &SpectrumTable::cutoff_energy)
      .def("size", &SpectrumTable::size)
      .def("max_nx", &SpectrumTable::max_nx)
      .def("max_ny", &SpectrumTable::max_ny)
      .def("max_nz", &SpectrumTable::max_nz);
  m.def("enumerate_modes", &enumerate_modes, py::arg("trap"));

  py::class_<OverlapTable>(m, "OverlapTable")
      .def(py::init<const TrapModel&, const SpectrumTable&, int>(),
           py::arg("trap"), py::arg("spectrum"), py::arg("node_count") = 0)
      .def("overlap_indexed", &OverlapTable::overlap_indexed)
      .def("axis_integral", &OverlapTable::axis_integral);

  py::class_<OccupationProfile>(m, "OccupationProfile")
      .def_readonly("n_perp", &OccupationProfile::n_perp)
      .def_readonly("temperature", &OccupationProfile::temperature)
      .def_readonly("alpha", &OccupationProfile::alpha)
      .def_readonly("mu_perp", &OccupationProfile::mu_perp)
      .def_readonly("occupation", &OccupationProfile::occupation);
  m.def("solve_occupations", &solve_occupations, py::arg("spectrum"),
        py::arg("n_perp"), py::arg("temperature"));
  m.def("bose_occupation", &bose_occupation, py::arg("energy"),
        py::arg("alpha"), py::arg("beta"));

  py::class_<CanonicalTable>(m, "CanonicalTable")
      .def_readonly("temperature", &CanonicalTable::temperature)
      .def_readonly("beta", &CanonicalTable::beta)
      .def_readonly("energy_ref", &CanonicalTable::energy_ref)
      .def_readonly("ln_z", &CanonicalTable::ln_z)
      .def("ln_z_absolute", &CanonicalTable::ln_z_absolute)
      .def("mu_perp", &CanonicalTable::mu_perp);
  m.def("canonical_partition_table", &canonical_partition_table,
        py::arg("spectrum"), py::arg("n_max"), py::arg("temperature"));

  m.def("broadened_delta", &broadened_delta, py::arg("delta_omega"),
        py::arg("gamma"));

  py::class_<RateOptions>(m, "RateOptions")
      .def(py::init<>())
      .def_readwrite("mode", &RateOptions::mode)
      .def_readwrite("window", &RateOptions::window)
      .def_readwrite("kernel_cutoff", &RateOptions::kernel_cutoff)
      .def_readwrite("include_secondary", &RateOptions::include_secondary)
      .def_readwrite("threads", &RateOptions::threads);

  py::class_<RatePair>(m, "RatePair")
      .def_readonly("plus", &RatePair::plus)
      .def_readonly("minus", &RatePair::minus);

  py::class_<RateTable>(m, "RateTable")
      .def_readonly("n_total", &RateTable::n_total)
      .def_readonly("temperature", &RateTable::temperature)
      .def_readonly("gamma", &RateTable::gamma)
      .def_readonly("mode", &RateTable::mode)
      .def_readonly("lambda_plus", &RateTable::lambda_plus)
      .def_readonly("lambda_minus", &RateTable::lambda_minus)
      .def_readonly("mu_perp", &RateTable::mu_perp)
      .def_readonly("xi_plus", &RateTable::xi_plus)
      .def_readonly("xi_minus", &RateTable::xi_minus)
      .def_readonly("gamma_plus", &RateTable::gamma_plus)
      .def_readonly("gamma_minus", &RateTable::gamma_minus)
      .def("has_pair_rates", &RateTable::has_pair_rates);

  m.def("single_particle_rates", &single_particle_rates, py::arg("trap"),
        py::arg("spectrum"), py::arg("overlaps"), py::arg("profile"),
        py::arg("options") = RateOptions{});
  m.def("pair_rates", &pair_rates, py::arg("trap"), py::arg("spectrum"),
        py::arg("overlaps"), py::arg("profile"),
        py::arg("options") = RateOptions{});
  m.def("build_rate_table", &build_rate_table, py::arg("trap"),
        py::arg("spectrum"), py::arg("overlaps"),
        py::arg("options") = RateOptions{},
        py::arg("with_pair_rates") = false);
  m.def("detailed_balance_residuals", &detailed_balance_residuals,
        py::arg("table"), py::arg("trap"));

  py::class_<Distribution>(m, "Distribution")
      .def(py::init<>())
      .def(py::init([](std::vector<double> p) {
             return Distribution{std::move(p)};
           }),
           py::arg("p"))
      .def_readwrite("p", &Distribution::p)
      .def("mean", &Distribution::mean)
      .def("stddev", &Distribution::stddev);
  m.def("total_variation", &total_variation, py::arg("a"), py::arg("b"));

  py::class_<PropagateOptions>(m, "PropagateOptions")
      .def(py::init<>())
      .def_readwrite("integrator", &PropagateOptions::integrator)
      .def_readwrite("rel_tol", &PropagateOptions::rel_tol)
      .def_readwrite("abs_tol", &PropagateOptions::abs_tol)
      .def_readwrite("t_final", &PropagateOptions::t_final)
      .def_readwrite("output_points", &PropagateOptions::output_points)
      .def_readwrite("snapshot_stride", &PropagateOptions::snapshot_stride)
      .def_readwrite("clip_budget", &PropagateOptions::clip_budget);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("mean", &Trajectory::mean)
      .def_readonly("stddev", &Trajectory::stddev)
      .def_readonly("snapshot_rows", &Trajectory::snapshot_rows)
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("clipped_mass", &Trajectory::clipped_mass)
      .def_readonly("max_norm_drift", &Trajectory::max_norm_drift)
      .def_readonly("accepted_steps", &Trajectory::accepted_steps)
      .def_readonly("rejected_steps", &Trajectory::rejected_steps)
      .def_readonly("final_state", &Trajectory::final_state);

  m.def("propagate", &propagate, py::arg("rates"), py::arg("initial"),
        py::arg("options"));
  m.def("steady_state", &steady_state, py::arg("rates"));
  m.def("mean_growth", &mean_growth, py::arg("rates"), py::arg("n0_start"),
        py::arg("times"));
  m.def("apply_generator",
        [](const RateTable& rates, const std::vector<double>& p) {
          std::vector<double> dpdt;
          apply_generator(rates, p, dpdt);
          return dpdt;
        },
        py::arg("rates"), py::arg("p"));

  py::class_<CanonicalMarginal>(m, "CanonicalMarginal")
      .def_readonly("dist", &CanonicalMarginal::dist)
      .def_readonly("temperature", &CanonicalMarginal::temperature);
  m.def("thermal_marginal", &thermal_marginal, py::arg("spectrum"),
        py::arg("table"), py::arg("n_total"));
  m.def("critical_temperature", &critical_temperature, py::arg("trap"));

  py::class_<CondensatePoint>(m, "CondensatePoint")
      .def_readonly("temperature", &CondensatePoint::temperature)
      .def_readonly("t_over_tc", &CondensatePoint::t_over_tc)
      .def_readonly("mean_fraction_oracle",
                    &CondensatePoint::mean_fraction_oracle)
      .def_readonly("std_oracle", &CondensatePoint::std_oracle)
      .def_readonly("mean_fraction_kinetics",
                    &CondensatePoint::mean_fraction_kinetics)
      .def_readonly("std_kinetics", &CondensatePoint::std_kinetics);

  py::class_<SweepOptions>(m, "SweepOptions")
      .def(py::init<>())
      .def_readwrite("t_over_tc", &SweepOptions::t_over_tc)
      .def_readwrite("rates", &SweepOptions::rates);
  m.def("condensate_curves", &condensate_curves, py::arg("trap"),
        py::arg("options"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("run", &RunConfig::run)
      .def_readwrite("n_total", &RunConfig::n_total)
      .def_readwrite("omega_x_hz", &RunConfig::omega_x_hz)
      .def_readwrite("omega_y_hz", &RunConfig::omega_y_hz)
      .def_readwrite("omega_z_hz", &RunConfig::omega_z_hz)
      .def_readwrite("mass_amu", &RunConfig::mass_amu)
      .def_readwrite("scattering_length_nm", &RunConfig::scattering_length_nm)
      .def_readwrite("temperature_nk", &RunConfig::temperature_nk)
      .def_readwrite("gamma_hz", &RunConfig::gamma_hz)
      .def_readwrite("energy_cutoff_kbt", &RunConfig::energy_cutoff_kbt)
      .def_readwrite("kernel_cutoff_kbt", &RunConfig::kernel_cutoff_kbt)
      .def_readwrite("window_gamma", &RunConfig::window_gamma)
      .def_readwrite("rate_mode", &RunConfig::rate_mode)
      .def_readwrite("include_pair_rates", &RunConfig::include_pair_rates)
      .def_readwrite("include_secondary_terms",
                     &RunConfig::include_secondary_terms)
      .def_readwrite("integrator", &RunConfig::integrator)
      .def_readwrite("rel_tol", &RunConfig::rel_tol)
      .def_readwrite("abs_tol", &RunConfig::abs_tol)
      .def_readwrite("t_final_s", &RunConfig::t_final_s)
      .def_readwrite("output_points", &RunConfig::output_points)
      .def_readwrite("snapshot_stride", &RunConfig::snapshot_stride)
      .def_readwrite("initial_state", &RunConfig::initial_state)
      .def_readwrite("sweep_t_over_tc_min", &RunConfig::sweep_t_over_tc_min)
      .def_readwrite("sweep_t_over_tc_max", &RunConfig::sweep_t_over_tc_max)
      .def_readwrite("sweep_points", &RunConfig::sweep_points)
      .def_readwrite("threads", &RunConfig::threads)
      .def_readwrite("out_dir", &RunConfig::out_dir);
  m.def("parse_config", &parse_config, py::arg("path"));
  m.def("parse_config_text", &parse_config_text, py::arg("text"));
  m.def("make_trap", &make_trap, py::arg("config"));

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("outputs", &RunResult::outputs);
  m.def("run", &run, py::arg("config"), py::arg("subcommand"));
}
