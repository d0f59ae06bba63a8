#pragma once

#include <vector>

#include "becsim/canonical.hpp"
#include "becsim/kinetics.hpp"
#include "becsim/rates.hpp"
#include "becsim/spectrum.hpp"
#include "becsim/trap.hpp"

namespace becsim {

// Canonical distribution of the condensate occupation for N conserved
// atoms: p(N0) proportional to exp(-beta*mu_0*N0) * Z_perp(N - N0),
// assembled in logs from the partition table. Serves as the equilibrium
// reference the kinetic steady state is judged against.
struct CanonicalMarginal {
  Distribution dist;
  double temperature = 0;
};

CanonicalMarginal thermal_marginal(const SpectrumTable& spectrum,
                                   const CanonicalTable& table, int n_total);

// kB*Tc = hbar * mean_omega * (N / zeta(3))^(1/3): the ideal-gas
// condensation scale, used to place temperature grids.
double critical_temperature(const TrapModel& trap);

struct CondensatePoint {
  double temperature = 0;  // K
  double t_over_tc = 0;
  double mean_fraction_oracle = 0;
  double std_oracle = 0;  // occupation units, not fraction
  double mean_fraction_kinetics = 0;
  double std_kinetics = 0;
};

struct SweepOptions {
  std::vector<double> t_over_tc;  // grid, each entry > 0
  RateOptions rates;
};

// Equilibrium condensate curve both ways at every grid temperature: the
// canonical marginal and the steady state of the kinetic ladder, each with
// its own spectrum, partition table and rate table.
std::vector<CondensatePoint> condensate_curves(const TrapModel& trap,
                                               const SweepOptions& opt);

}  // namespace becsim
