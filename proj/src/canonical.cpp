#include "becsim/canonical.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/logsum.hpp"

namespace becsim {

namespace c = constants;

double bose_occupation(double energy, double alpha, double beta) {
  const double x = beta * energy + alpha;
  if (x > 700.0) return std::exp(-x);  // 1/(e^x-1) ~ e^-x, avoids overflow
  return 1.0 / std::expm1(x);
}

namespace {

struct Residual {
  double value;
  double derivative;  // d(residual)/dx
};

// Constraint sum in the gap variable x = alpha + beta*energy[0] > 0 with
// precomputed gaps d_i = beta*(energy_i - energy_0). Working in x avoids the
// cancellation of alpha against beta*energy when the root sits a hair above
// the lowest level's divergence (tiny lowest weight, large n_perp).
Residual constraint_residual(const std::vector<double>& gap,
                             const std::vector<double>& weight, double x,
                             double n_perp) {
  double f = 0.0, df = 0.0;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    const double a = x + gap[i];
    if (a > 700.0) {
      const double occ = std::exp(-a);
      f += weight[i] * occ;
      df -= weight[i] * occ;
      continue;
    }
    const double occ = 1.0 / std::expm1(a);
    f += weight[i] * occ;
    df -= weight[i] * (occ * occ + occ);  // e^a/(e^a-1)^2 = occ^2 + occ
  }
  return {f - n_perp, df};
}

}  // namespace

double solve_alpha_on_levels(const std::vector<double>& energy,
                             const std::vector<double>& weight, double n_perp,
                             double beta) {
  if (energy.empty()) throw StructuralError("alpha solve: no levels");
  if (!(n_perp > 0)) throw NumericError("alpha solve: n_perp must be > 0");

  std::vector<double> gap(energy.size());
  for (std::size_t i = 0; i < energy.size(); ++i)
    gap[i] = beta * (energy[i] - energy[0]);

  // Bracket the root: residual -> +inf as x -> 0+, -n_perp as x -> +inf.
  double lo = 1.0;
  for (int i = 0; i < 2000 &&
                  constraint_residual(gap, weight, lo, n_perp).value < 0.0;
       ++i)
    lo /= 16.0;
  double hi = lo + 1.0;
  while (constraint_residual(gap, weight, hi, n_perp).value > 0.0) hi *= 2.0;

  double x = (lo < 1.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
  const double tol = 1e-12;
  for (int it = 0; it < 200; ++it) {
    Residual r = constraint_residual(gap, weight, x, n_perp);
    if (std::abs(r.value) <= tol * n_perp) return x - beta * energy[0];
    if (r.value > 0.0)
      lo = x;
    else
      hi = x;
    double next = x - r.value / r.derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect fallback
    x = next;
  }
  throw NumericError(
      "alpha solve did not converge: n_perp=" + std::to_string(n_perp) +
      " bracket=[" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}

OccupationProfile solve_occupations(const SpectrumTable& spectrum,
                                    double n_perp, double temperature) {
  if (n_perp < 0) throw NumericError("solve_occupations: n_perp < 0");
  if (!(temperature > 0))
    throw NumericError("solve_occupations: temperature must be > 0");

  OccupationProfile prof;
  prof.n_perp = n_perp;
  prof.temperature = temperature;
  prof.occupation.assign(spectrum.size(), 0.0);
  if (n_perp == 0) {
    prof.alpha = std::numeric_limits<double>::infinity();
    prof.mu_perp = -std::numeric_limits<double>::infinity();
    return prof;
  }

  const double beta = 1.0 / (c::kb * temperature);
  EnergyClasses cls = group_energies(spectrum);
  std::vector<double> weight(cls.degeneracy.begin(), cls.degeneracy.end());
  prof.alpha = solve_alpha_on_levels(cls.energy, weight, n_perp, beta);
  prof.mu_perp = -prof.alpha / beta;

  std::vector<double> class_occ(cls.energy.size());
  for (std::size_t i = 0; i < cls.energy.size(); ++i)
    class_occ[i] = bose_occupation(cls.energy[i], prof.alpha, beta);
  for (std::size_t k = 0; k < spectrum.size(); ++k)
    prof.occupation[k] = class_occ[cls.mode_class[k]];
  return prof;
}

CanonicalTable canonical_partition_table(const SpectrumTable& spectrum,
                                         int n_max, double temperature) {
  if (n_max < 0) throw NumericError("partition table: n_max < 0");
  if (!(temperature > 0))
    throw NumericError("partition table: temperature must be > 0");

  CanonicalTable table;
  table.temperature = temperature;
  table.beta = 1.0 / (c::kb * temperature);
  EnergyClasses cls = group_energies(spectrum);
  table.energy_ref = cls.energy[0];

  // Single-particle sums z1(j*beta) over shifted energies: the leading term
  // is the degeneracy of the lowest excited class, so z1 >= 1 and the log is
  // always finite.
  std::vector<double> shifted(cls.energy.size());
  for (std::size_t i = 0; i < shifted.size(); ++i)
    shifted[i] = table.beta * (cls.energy[i] - table.energy_ref);

  std::vector<double> ln_z1(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      const double x = j * shifted[i];
      if (x > 745.0) break;  // classes ascend; the rest underflow
      s += cls.degeneracy[i] * std::exp(-x);
    }
    ln_z1[j] = std::log(s);
  }

  table.ln_z.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  std::vector<double> terms;
  for (int n = 1; n <= n_max; ++n) {
    terms.clear();
    terms.reserve(n);
    for (int j = 1; j <= n; ++j)
      terms.push_back(ln_z1[j] + table.ln_z[n - j]);
    table.ln_z[n] = log_sum(terms) - std::log(static_cast<double>(n));
  }
  return table;
}

namespace {

double microstate_count(int n, int modes) {
  // C(n + modes - 1, modes - 1)
  return std::exp(std::lgamma(n + modes) - std::lgamma(n + 1.0) -
                  std::lgamma(static_cast<double>(modes)));
}

}  // namespace

CanonicalEnsemble enumerate_canonical(const SpectrumTable& spectrum, int n,
                                      double temperature) {
  const int modes = static_cast<int>(spectrum.size());
  if (modes == 0) throw StructuralError("enumerate_canonical: empty spectrum");
  if (n < 0) throw NumericError("enumerate_canonical: n < 0");
  if (microstate_count(n, modes) > 2e6)
    throw NumericError("enumerate_canonical: microstate count too large");

  const double beta = 1.0 / (c::kb * temperature);
  const double e_min = spectrum.modes.front().energy;

  CanonicalEnsemble out;
  out.occupation.assign(spectrum.size(), 0.0);
  double z = 0.0;

  // Depth-first over occupancy vectors with sum n; energies measured from
  // n*e_min so the weights stay O(1).
  std::vector<int> occ(spectrum.size(), 0);
  auto walk = [&](auto&& self, int mode, int left, double energy) -> void {
    if (mode == modes - 1) {
      occ[mode] = left;
      const double w =
          std::exp(-beta * (energy + left * (spectrum.modes[mode].energy - e_min)));
      z += w;
      for (int k = 0; k < modes; ++k) out.occupation[k] += occ[k] * w;
      return;
    }
    const double step = spectrum.modes[mode].energy - e_min;
    for (int take = 0; take <= left; ++take) {
      occ[mode] = take;
      self(self, mode + 1, left - take, energy + take * step);
    }
    occ[mode] = 0;
  };
  walk(walk, 0, n, 0.0);

  for (auto& o : out.occupation) o /= z;
  out.ln_z = std::log(z) - beta * n * e_min;
  return out;
}

}  // namespace becsim
