#pragma once

#include <vector>

#include "becsim/spectrum.hpp"

namespace becsim {

// Mean Bose occupations of the excited spectrum holding exactly n_perp atoms
// at temperature T. alpha is the Lagrange multiplier of the number
// constraint; mu_perp = -alpha/beta is the matching chemical potential
// (absolute energy convention, comparable with the trap ground energy).
struct OccupationProfile {
  double n_perp = 0;
  double temperature = 0;
  double alpha = 0;
  double mu_perp = 0;
  std::vector<double> occupation;  // per mode, aligned with SpectrumTable
};

// 1/(exp(beta*energy + alpha) - 1), safe against overflow for large
// arguments. energy is absolute.
double bose_occupation(double energy, double alpha, double beta);

// Solves sum_k occupation_k = n_perp for alpha on the open domain
// alpha > -beta*E_min (bisection-safeguarded Newton, normalized residual
// below 1e-12). n_perp = 0 returns the empty profile. Throws NumericError
// with bracket diagnostics when out of iterations.
OccupationProfile solve_occupations(const SpectrumTable& spectrum,
                                    double n_perp, double temperature);

// Same solve on an explicit weighted level list (weights need not be
// integers; the semiclassical path feeds a binned density of states).
// Returns alpha.
double solve_alpha_on_levels(const std::vector<double>& energy,
                             const std::vector<double>& weight, double n_perp,
                             double beta);

// Canonical partition function of 0..n_max non-interacting bosons on the
// excited spectrum. Per-particle energies are measured from the lowest
// excited mode (energy_ref): that keeps ln_z finite and strictly increasing
// in n whenever more than one state is accessible, and only ratios enter
// downstream, where the reference appears as an explicit linear tilt.
struct CanonicalTable {
  double temperature = 0;
  double beta = 0;
  double energy_ref = 0;           // J, absolute energy of the lowest excited mode
  std::vector<double> ln_z;        // index n = 0..n_max

  double ln_z_absolute(std::size_t n) const {
    return ln_z[n] - static_cast<double>(n) * beta * energy_ref;
  }
  // Chemical potential implied by the table through a first difference.
  double mu_perp(std::size_t n) const {
    return energy_ref - (ln_z[n] - ln_z[n - 1]) / beta;
  }
};

// Bosonic counting recursion Z(n) = (1/n) sum_j z1(j*beta) Z(n-j), evaluated
// in the log domain.
CanonicalTable canonical_partition_table(const SpectrumTable& spectrum,
                                         int n_max, double temperature);

// Exact microstate enumeration over the excited spectrum: independent oracle
// for the recursion, practical only for a handful of modes. ln_z is in the
// absolute energy convention.
struct CanonicalEnsemble {
  double ln_z = 0;
  std::vector<double> occupation;  // per mode
};

CanonicalEnsemble enumerate_canonical(const SpectrumTable& spectrum, int n,
                                      double temperature);

}  // namespace becsim
