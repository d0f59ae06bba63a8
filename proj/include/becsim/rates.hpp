#pragma once

#include <vector>

#include "becsim/canonical.hpp"
#include "becsim/overlap.hpp"
#include "becsim/spectrum.hpp"
#include "becsim/trap.hpp"

namespace becsim {

enum class RateMode { discrete, semiclassical };

// Half-line Fourier transform of the Gaussian bath correlator:
//   Re int_0^inf exp(-gamma^2 t^2) exp(i dw t) dt
//   = sqrt(pi)/(2*gamma) * exp(-dw^2/(4*gamma^2))      [seconds]
// This is the finite-width energy-conservation window of every collision
// sum below.
double broadened_delta(double delta_omega, double gamma);

struct RateOptions {
  RateMode mode = RateMode::discrete;
  // Triples are admitted when |delta omega| <= window * gamma. 8 keeps the
  // discarded Gaussian tail below e^-16.
  double window = 8.0;
  // Excitation cap (units of kB*T) on modes entering collision sums. Bose
  // factors suppress anything above ~8 kB*T to the percent level while the
  // feeding/loss ratio is untouched; raise to energy_cutoff for exact sums.
  double kernel_cutoff = 8.0;
  // Extra contractions resonant at the condensate frequency instead of at
  // energy balance; they matter only when an excited mode sits within
  // ~gamma of the condensate and are off in the reference treatment.
  bool include_secondary = false;
  int threads = 1;
};

struct RatePair {
  double plus = 0;   // condensate feeding, 1/s
  double minus = 0;  // condensate loss, 1/s
};

// Single-particle exchange rates for one occupancy profile: the windowed,
// parity-pruned triple sum evaluated directly over discrete modes (the
// profile's per-mode occupations are used as given, so hand-built profiles
// work). opt.mode is ignored here; the semiclassical reduction only exists
// at table scale.
RatePair single_particle_rates(const TrapModel& trap,
                               const SpectrumTable& spectrum,
                               const OverlapTable& overlaps,
                               const OccupationProfile& profile,
                               const RateOptions& opt = {});

// Pair-exchange rates (two condensate atoms per event). No energy window:
// every parity-allowed pair enters with its exact Gaussian factor, since
// these rates are usually pure suppression diagnostics.
RatePair pair_rates(const TrapModel& trap, const SpectrumTable& spectrum,
                    const OverlapTable& overlaps,
                    const OccupationProfile& profile,
                    const RateOptions& opt = {});

// Rates over the whole ladder N0 = 0..N, with n_perp = N - N0.
// lambda_*[n_perp] are per-atom rates; xi_*[n0] the ladder rates
//   xi_plus(n0)  = 2*(n0+1)*lambda_plus(N-n0)
//   xi_minus(n0) = 2*n0*lambda_minus(N-n0+1)
// Both legs of the link n0 <-> n0+1 read the bath at the link's common
// n_perp = N-n0, so one bath spectral function serves the up and the down
// direction (Einstein pairing). That puts the stationary chain on the
// canonical marginal and the growth fixed point on lambda+ = lambda-.
// gamma_* are the pair-event ladder rates, filled only on request.
struct RateTable {
  int n_total = 0;
  double temperature = 0;  // K
  double gamma = 0;        // 1/s
  RateMode mode = RateMode::discrete;
  std::vector<double> lambda_plus, lambda_minus;  // index n_perp = 0..N
  std::vector<double> mu_perp;                    // index n_perp, J
  std::vector<double> xi_plus, xi_minus;          // index n0 = 0..N
  std::vector<double> gamma_plus, gamma_minus;    // index n0; may be empty

  bool has_pair_rates() const { return !gamma_plus.empty(); }
};

// Builds the table by aggregating the triple sum into an energy-class kernel
// once and contracting it against each n_perp's occupancies (every n_perp
// gets its own constraint solve). Deterministic for any thread count.
RateTable build_rate_table(const TrapModel& trap, const SpectrumTable& spectrum,
                           const OverlapTable& overlaps,
                           const RateOptions& opt = {},
                           bool with_pair_rates = false);

// exp(ln lambda_plus - ln lambda_minus - beta*(mu_perp - mu_0)) - 1 per
// n_perp, with mu_0 the condensate (trap ground) energy. NaN where a rate
// vanishes. Small against beta*hbar*gamma when the window is narrow.
std::vector<double> detailed_balance_residuals(const RateTable& table,
                                               const TrapModel& trap);

}  // namespace becsim
