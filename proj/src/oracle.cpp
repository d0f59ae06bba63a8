#include "becsim/oracle.hpp"

#include <cmath>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/logsum.hpp"
#include "becsim/overlap.hpp"

namespace becsim {

namespace c = constants;

CanonicalMarginal thermal_marginal(const SpectrumTable& spectrum,
                                   const CanonicalTable& table, int n_total) {
  if (n_total < 1)
    throw StructuralError("thermal_marginal: n_total must be at least 1");
  if (table.ln_z.size() < static_cast<std::size_t>(n_total) + 1)
    throw StructuralError("thermal_marginal: partition table too short");
  // ln p(N0) = -beta*mu_0*N0 + ln Z_perp(N - N0) up to the normalization;
  // with the table's shifted energy reference the condensate energy enters
  // only through the linear tilt below.
  const double tilt =
      table.beta * (table.energy_ref - spectrum.ground_energy);
  std::vector<double> lnp(static_cast<std::size_t>(n_total) + 1);
  for (int n0 = 0; n0 <= n_total; ++n0)
    lnp[n0] = static_cast<double>(n0) * tilt + table.ln_z[n_total - n0];
  const double norm = log_sum(lnp);

  CanonicalMarginal out;
  out.temperature = table.temperature;
  out.dist.p.resize(lnp.size());
  for (std::size_t i = 0; i < lnp.size(); ++i)
    out.dist.p[i] = std::exp(lnp[i] - norm);
  return out;
}

double critical_temperature(const TrapModel& trap) {
  if (trap.n_total < 1)
    throw ConfigError(std::string("critical_temperature: n_total must be at least 1"));
  return c::hbar * trap.mean_omega() *
         std::cbrt(static_cast<double>(trap.n_total) / c::zeta3) / c::kb;
}

std::vector<CondensatePoint> condensate_curves(const TrapModel& trap,
                                               const SweepOptions& opt) {
  if (opt.t_over_tc.empty())
    throw ConfigError(std::string("condensate_curves: empty temperature grid"));
  for (double t : opt.t_over_tc)
    if (!(t > 0))
      throw ConfigError(std::string("condensate_curves: grid entries must be positive"));

  const double tc = critical_temperature(trap);
  const double n = static_cast<double>(trap.n_total);

  std::vector<CondensatePoint> out;
  out.reserve(opt.t_over_tc.size());
  for (double t_rel : opt.t_over_tc) {
    TrapModel warm = trap;
    warm.temperature = t_rel * tc;

    const SpectrumTable spectrum = enumerate_modes(warm);
    const OverlapTable overlaps(warm, spectrum);
    const CanonicalTable partition =
        canonical_partition_table(spectrum, warm.n_total, warm.temperature);
    const CanonicalMarginal marginal =
        thermal_marginal(spectrum, partition, warm.n_total);
    const RateTable rates =
        build_rate_table(warm, spectrum, overlaps, opt.rates, false);
    const Distribution steady = steady_state(rates);

    CondensatePoint pt;
    pt.temperature = warm.temperature;
    pt.t_over_tc = t_rel;
    pt.mean_fraction_oracle = marginal.dist.mean() / n;
    pt.std_oracle = marginal.dist.stddev();
    pt.mean_fraction_kinetics = steady.mean() / n;
    pt.std_kinetics = steady.stddev();
    out.push_back(pt);
  }
  return out;
}

}  // namespace becsim
