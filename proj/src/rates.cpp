#include "becsim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/parallel.hpp"

namespace becsim {

namespace c = constants;

double broadened_delta(double delta_omega, double gamma) {
  if (!(gamma > 0))
    throw NumericError("broadened_delta: gamma must be positive");
  const double x = delta_omega / (2.0 * gamma);
  return std::sqrt(c::pi) / (2.0 * gamma) * std::exp(-x * x);
}

namespace {

double single_prefactor(const TrapModel& trap) {
  const double ha = c::hbar * trap.scattering_length / trap.mass;
  return 16.0 * c::pi * c::pi * c::pi * ha * ha;
}

double pair_prefactor(const TrapModel& trap) {
  const double ha = c::hbar * trap.scattering_length / trap.mass;
  return 4.0 * c::pi * c::pi * c::pi * ha * ha;
}

std::uint8_t mode_octant(const Mode& m) {
  return static_cast<std::uint8_t>((m.nx & 1) | ((m.ny & 1) << 1) |
                                   ((m.nz & 1) << 2));
}

// Collision-sum working set: the admitted modes (kernel cutoff applied)
// grouped into the classes the kernels contract over. Occupations depend on
// energy alone, so discrete mode groups exact degenerate levels and
// semiclassical mode groups hbar*gamma bins carrying a density-of-states
// weight per leg.
struct SourceSet {
  std::vector<Mode> modes;  // spectrum prefix, ascending energy
  std::vector<double> exc;  // excitation energy per mode, J
  std::vector<std::uint32_t> cls;
  std::vector<std::uint8_t> octant;  // per-axis parity bits x | y<<1 | z<<2
  int n_class = 0;
  std::vector<double> cls_lo, cls_hi;  // excitation bounds per class
  std::vector<double> cls_exc;         // representative excitation
  std::vector<double> cls_leg;         // weight applied once per leg
  std::vector<std::size_t> cls_begin;  // class -> first mode, size n_class+1
  // modes regrouped by bucket id = class*8 + octant, ids ascending in each
  std::vector<std::uint32_t> bucket_modes;
  std::vector<std::size_t> bucket_off;  // size n_class*8 + 1
  double window = 0;   // energy admission half-width, J
  double exc_top = 0;  // largest cls_hi
};

SourceSet build_sources(const TrapModel& trap, const SpectrumTable& spectrum,
                        const RateOptions& opt, RateMode mode) {
  if (spectrum.size() == 0) throw StructuralError("rates: empty spectrum");
  if (!(trap.gamma > 0))
    throw NumericError("rates: gamma must be positive");

  SourceSet s;
  const double e0 = spectrum.ground_energy;
  const double cap = std::min(opt.kernel_cutoff, trap.energy_cutoff) * c::kb *
                     trap.temperature;
  auto end = std::partition_point(
      spectrum.modes.begin(), spectrum.modes.end(),
      [&](const Mode& m) { return m.energy - e0 <= cap; });
  if (end == spectrum.modes.begin())
    throw StructuralError("rates: kernel cutoff admits no excited mode");
  s.modes.assign(spectrum.modes.begin(), end);

  const std::size_t n = s.modes.size();
  s.exc.resize(n);
  s.octant.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.exc[i] = s.modes[i].energy - e0;
    s.octant[i] = mode_octant(s.modes[i]);
  }

  if (mode == RateMode::discrete) {
    EnergyClasses full = group_energies(spectrum);
    s.cls.assign(full.mode_class.begin(), full.mode_class.begin() + n);
    s.n_class = static_cast<int>(s.cls.back()) + 1;
    for (int ci = 0; ci < s.n_class; ++ci) {
      const double exc = full.energy[ci] - e0;
      s.cls_lo.push_back(exc);
      s.cls_hi.push_back(exc);
      s.cls_exc.push_back(exc);
      s.cls_leg.push_back(1.0);
    }
  } else {
    const double de = c::hbar * trap.gamma;
    const double dos = 1.0 / (2.0 * c::hbar * c::hbar * c::hbar *
                              trap.omega_x * trap.omega_y * trap.omega_z);
    long prev = -1;
    std::vector<int> count;
    for (std::size_t i = 0; i < n; ++i) {
      const long bin = static_cast<long>(std::floor(s.exc[i] / de));
      if (bin != prev) {
        prev = bin;
        s.cls_lo.push_back(static_cast<double>(bin) * de);
        s.cls_hi.push_back(static_cast<double>(bin + 1) * de);
        s.cls_exc.push_back((static_cast<double>(bin) + 0.5) * de);
        count.push_back(0);
      }
      s.cls.push_back(static_cast<std::uint32_t>(s.cls_lo.size() - 1));
      ++count.back();
    }
    s.n_class = static_cast<int>(s.cls_lo.size());
    for (int ci = 0; ci < s.n_class; ++ci) {
      const double g = s.cls_exc[ci] * s.cls_exc[ci] * dos;
      s.cls_leg.push_back(g * de / static_cast<double>(count[ci]));
    }
  }

  s.cls_begin.assign(static_cast<std::size_t>(s.n_class) + 1, 0);
  for (std::uint32_t cid : s.cls) ++s.cls_begin[cid + 1];
  for (int ci = 0; ci < s.n_class; ++ci) s.cls_begin[ci + 1] += s.cls_begin[ci];

  s.bucket_off.assign(static_cast<std::size_t>(s.n_class) * 8 + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    ++s.bucket_off[static_cast<std::size_t>(s.cls[i]) * 8 + s.octant[i] + 1];
  for (std::size_t b = 1; b < s.bucket_off.size(); ++b)
    s.bucket_off[b] += s.bucket_off[b - 1];
  s.bucket_modes.resize(n);
  std::vector<std::size_t> cursor(s.bucket_off.begin(), s.bucket_off.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b =
        static_cast<std::size_t>(s.cls[i]) * 8 + s.octant[i];
    s.bucket_modes[cursor[b]++] = static_cast<std::uint32_t>(i);
  }

  s.window = opt.window * c::hbar * trap.gamma;
  s.exc_top = s.cls_hi.back();
  return s;
}

struct ZetaEval {
  const AxisOverlapTable* x;
  const AxisOverlapTable* y;
  const AxisOverlapTable* z;
  double scale3;  // product of the three axis length scales, m^-3/2 each
};

ZetaEval make_zeta(const OverlapTable& overlaps) {
  return {&overlaps.axis_table(0), &overlaps.axis_table(1),
          &overlaps.axis_table(2),
          overlaps.axis_scale(0) * overlaps.axis_scale(1) *
              overlaps.axis_scale(2)};
}

void check_range(const SourceSet& s, const ZetaEval& zt) {
  int mx = 0, my = 0, mz = 0;
  for (const Mode& m : s.modes) {
    mx = std::max(mx, m.nx);
    my = std::max(my, m.ny);
    mz = std::max(mz, m.nz);
  }
  if (mx > zt.x->n_max() || my > zt.y->n_max() || mz > zt.z->n_max())
    throw StructuralError("rates: overlap table smaller than the spectrum");
}

// Calls visit(i, j, m, cm, mult, zeta) for every window-admitted,
// parity-allowed triple whose lower source mode lies in class ci. j runs
// upward from i while the energy target can still reach a class, the target
// class range is tracked with two monotone cursors, and m comes from the
// parity-matched buckets inside that range. The visit order is a pure
// function of the source set, never of the thread layout, which is what
// makes every consumer reproducible.
template <class Visit>
void for_each_triple(const SourceSet& s, const ZetaEval& zt, int ci,
                     Visit&& visit) {
  const std::size_t n = s.modes.size();
  const int nc = s.n_class;
  for (std::size_t i = s.cls_begin[ci]; i < s.cls_begin[ci + 1]; ++i) {
    const Mode& mi = s.modes[i];
    const double exc_i = s.exc[i];
    const std::uint8_t oi = s.octant[i];
    int c0 = 0, c1 = -1;
    for (std::size_t j = i; j < n; ++j) {
      const double target = exc_i + s.exc[j];
      if (target > s.exc_top + s.window) break;
      while (c1 + 1 < nc && s.cls_lo[c1 + 1] <= target + s.window) ++c1;
      while (c0 <= c1 && s.cls_hi[c0] < target - s.window) ++c0;
      if (c0 > c1) continue;
      const Mode& mj = s.modes[j];
      const double mult = (j == i) ? 1.0 : 2.0;
      const std::uint8_t om = oi ^ s.octant[j];
      const double* rx = zt.x->row(mi.nx, mj.nx);
      const double* ry = zt.y->row(mi.ny, mj.ny);
      const double* rz = zt.z->row(mi.nz, mj.nz);
      for (int cm = c0; cm <= c1; ++cm) {
        const std::size_t b = static_cast<std::size_t>(cm) * 8 + om;
        const std::size_t pend = s.bucket_off[b + 1];
        for (std::size_t pos = s.bucket_off[b]; pos < pend; ++pos) {
          const std::uint32_t m = s.bucket_modes[pos];
          const Mode& mm = s.modes[m];
          const double zeta = zt.scale3 * rx[mm.nx] * ry[mm.ny] * rz[mm.nz];
          visit(i, j, static_cast<std::size_t>(m), cm, mult, zeta);
        }
      }
    }
  }
}

// Aggregated single-particle sum: one entry per contributing class triple,
// with prefactor, pair multiplicity, leg weights and the Gaussian energy
// window already folded in. Contracting it against occupations is then all
// a given n_perp costs.
struct TripleKernel {
  struct Entry {
    std::uint32_t ck, cl, cm;
    double w;
  };
  std::vector<Entry> entries;
};

TripleKernel build_triple_kernel(const TrapModel& trap, const SourceSet& s,
                                 const ZetaEval& zt, const RateOptions& opt) {
  const int nc = s.n_class;
  const std::size_t nc2 = static_cast<std::size_t>(nc) * nc;

  // Slice allocation: each admissible ordered class pair (ci <= cj) owns a
  // contiguous span of target-class slots, so the parallel pass below can
  // accumulate without contention (a work item covers one ci and two items
  // never share a pair).
  std::vector<std::int64_t> off(nc2, -1);
  std::vector<std::int32_t> base(nc2, 0), len(nc2, 0);
  std::int64_t total = 0;
  for (int ci = 0; ci < nc; ++ci) {
    int c0 = 0, c1 = -1;
    for (int cj = ci; cj < nc; ++cj) {
      const double lo = s.cls_lo[ci] + s.cls_lo[cj];
      if (lo > s.exc_top + s.window) break;
      const double hi = s.cls_hi[ci] + s.cls_hi[cj];
      while (c1 + 1 < nc && s.cls_lo[c1 + 1] <= hi + s.window) ++c1;
      while (c0 <= c1 && s.cls_hi[c0] < lo - s.window) ++c0;
      if (c0 > c1) continue;
      const std::size_t key = static_cast<std::size_t>(ci) * nc + cj;
      off[key] = total;
      base[key] = c0;
      len[key] = c1 - c0 + 1;
      total += c1 - c0 + 1;
    }
  }
  if (total > 300000000)
    throw NumericError(
        "rates: kernel slice storage too large; lower kernel_cutoff or "
        "switch to semiclassical mode");

  std::vector<double> acc(static_cast<std::size_t>(total), 0.0);
  parallel_for(static_cast<std::size_t>(nc), opt.threads,
               [&](std::size_t item) {
                 const int ci = static_cast<int>(item);
                 for_each_triple(
                     s, zt, ci,
                     [&](std::size_t, std::size_t j, std::size_t, int cm,
                         double mult, double zeta) {
                       const std::size_t key =
                           static_cast<std::size_t>(ci) * nc + s.cls[j];
                       acc[off[key] + (cm - base[key])] += mult * zeta * zeta;
                     });
               });

  TripleKernel k;
  const double pref = single_prefactor(trap);
  for (int ci = 0; ci < nc; ++ci) {
    for (int cj = ci; cj < nc; ++cj) {
      const std::size_t key = static_cast<std::size_t>(ci) * nc + cj;
      if (off[key] < 0) continue;
      for (std::int32_t t = 0; t < len[key]; ++t) {
        const double w = acc[off[key] + t];
        if (w == 0.0) continue;
        const int cm = base[key] + t;
        const double dw =
            (s.cls_exc[ci] + s.cls_exc[cj] - s.cls_exc[cm]) / c::hbar;
        const double wf = pref * w * broadened_delta(dw, trap.gamma) *
                          s.cls_leg[ci] * s.cls_leg[cj] * s.cls_leg[cm];
        if (wf != 0.0)
          k.entries.push_back({static_cast<std::uint32_t>(ci),
                               static_cast<std::uint32_t>(cj),
                               static_cast<std::uint32_t>(cm), wf});
      }
    }
  }
  return k;
}

// Pair-exchange analogue: one entry per contributing class pair. No window
// pruning; the exact Gaussian keeps far-off-shell pairs at their true
// (tiny) weight.
struct PairKernel {
  struct Entry {
    std::uint32_t ck, cl;
    double w;
  };
  std::vector<Entry> entries;
};

PairKernel build_pair_kernel(const TrapModel& trap, const SourceSet& s,
                             const ZetaEval& zt, const RateOptions& opt) {
  const int nc = s.n_class;
  std::vector<double> acc(static_cast<std::size_t>(nc) * nc, 0.0);
  parallel_for(static_cast<std::size_t>(nc), opt.threads,
               [&](std::size_t item) {
    const int ci = static_cast<int>(item);
    for (std::size_t i = s.cls_begin[ci]; i < s.cls_begin[ci + 1]; ++i) {
      const Mode& mi = s.modes[i];
      const std::uint8_t o = s.octant[i];
      // both outgoing legs are the condensate, so the partner must match
      // the parity of i on every axis
      const double* rx = zt.x->row(mi.nx, 0);
      const double* ry = zt.y->row(mi.ny, 0);
      const double* rz = zt.z->row(mi.nz, 0);
      for (int cj = ci; cj < nc; ++cj) {
        const std::size_t b = static_cast<std::size_t>(cj) * 8 + o;
        std::size_t pos = s.bucket_off[b];
        const std::size_t pend = s.bucket_off[b + 1];
        if (cj == ci)
          pos = static_cast<std::size_t>(
              std::lower_bound(s.bucket_modes.begin() + pos,
                               s.bucket_modes.begin() + pend,
                               static_cast<std::uint32_t>(i)) -
              s.bucket_modes.begin());
        for (; pos < pend; ++pos) {
          const std::uint32_t j = s.bucket_modes[pos];
          const Mode& mj = s.modes[j];
          const double zeta = zt.scale3 * rx[mj.nx] * ry[mj.ny] * rz[mj.nz];
          const double mult = (j == i) ? 1.0 : 2.0;
          acc[static_cast<std::size_t>(ci) * nc + cj] += mult * zeta * zeta;
        }
      }
    }
  });

  PairKernel k;
  const double pref = pair_prefactor(trap);
  for (int ci = 0; ci < nc; ++ci) {
    for (int cj = ci; cj < nc; ++cj) {
      const double w = acc[static_cast<std::size_t>(ci) * nc + cj];
      if (w == 0.0) continue;
      const double dw = (s.cls_exc[ci] + s.cls_exc[cj]) / c::hbar;
      const double wf = pref * w * broadened_delta(dw, trap.gamma) *
                        s.cls_leg[ci] * s.cls_leg[cj];
      if (wf != 0.0)
        k.entries.push_back({static_cast<std::uint32_t>(ci),
                             static_cast<std::uint32_t>(cj), wf});
    }
  }
  return k;
}

// Contractions resonant at the condensate frequency. The two free sums share
// one linear form B(l) = sum_k occ_k A(k,l) with A(k,l) the two-k-leg
// overlap, so each admitted l costs one dot product over classes.
struct SecondaryTerms {
  struct Leg {
    std::uint32_t mode = 0;
    double front = 0;  // 2 * prefactor * delta * own leg weight
    std::vector<double> a_class;
  };
  std::vector<Leg> legs;
};

SecondaryTerms build_secondary(const TrapModel& trap, const SourceSet& s,
                               const ZetaEval& zt) {
  SecondaryTerms sec;
  const double pref = single_prefactor(trap);
  for (std::size_t l = 0; l < s.modes.size() && s.exc[l] <= s.window; ++l) {
    if (s.octant[l] != 0) continue;  // A(k,l) vanishes for odd l parity
    SecondaryTerms::Leg leg;
    leg.mode = static_cast<std::uint32_t>(l);
    leg.front = 2.0 * pref * broadened_delta(s.exc[l] / c::hbar, trap.gamma) *
                s.cls_leg[s.cls[l]];
    leg.a_class.assign(s.n_class, 0.0);
    const Mode& ml = s.modes[l];
    for (std::size_t kk = 0; kk < s.modes.size(); ++kk) {
      const Mode& mk = s.modes[kk];
      const double a = zt.scale3 * zt.x->value(mk.nx, mk.nx, ml.nx) *
                       zt.y->value(mk.ny, mk.ny, ml.ny) *
                       zt.z->value(mk.nz, mk.nz, ml.nz);
      leg.a_class[s.cls[kk]] += a * s.cls_leg[s.cls[kk]];
    }
    sec.legs.push_back(std::move(leg));
  }
  return sec;
}

}  // namespace

RatePair single_particle_rates(const TrapModel& trap,
                               const SpectrumTable& spectrum,
                               const OverlapTable& overlaps,
                               const OccupationProfile& profile,
                               const RateOptions& opt) {
  if (profile.occupation.size() != spectrum.size())
    throw StructuralError("rates: profile does not match the spectrum");
  const SourceSet s = build_sources(trap, spectrum, opt, RateMode::discrete);
  const ZetaEval zt = make_zeta(overlaps);
  check_range(s, zt);

  const double pref = single_prefactor(trap);
  const double gamma = trap.gamma;
  const std::vector<double>& occ = profile.occupation;
  // one partial sum per first class, reduced in class order below, so the
  // result does not depend on the thread count
  std::vector<double> part_p(s.n_class, 0.0), part_m(s.n_class, 0.0);
  parallel_for(static_cast<std::size_t>(s.n_class), opt.threads,
               [&](std::size_t item) {
    double lp = 0, lm = 0;
    for_each_triple(s, zt, static_cast<int>(item),
                    [&](std::size_t i, std::size_t j, std::size_t m, int,
                        double mult, double zeta) {
      const double wz = mult * zeta * zeta *
          broadened_delta((s.exc[i] + s.exc[j] - s.exc[m]) / c::hbar, gamma);
      const double ok = occ[i], ol = occ[j], om = occ[m];
      lp += wz * ok * ol * (1.0 + om);
      lm += wz * (1.0 + ok) * (1.0 + ol) * om;
    });
    part_p[item] = lp;
    part_m[item] = lm;
  });

  RatePair out;
  for (int ci = 0; ci < s.n_class; ++ci) {
    out.plus += part_p[ci];
    out.minus += part_m[ci];
  }
  out.plus *= pref;
  out.minus *= pref;

  if (opt.include_secondary) {
    for (std::size_t l = 0; l < s.modes.size() && s.exc[l] <= s.window; ++l) {
      if (s.octant[l] != 0) continue;
      const Mode& ml = s.modes[l];
      double b = 0;
      for (std::size_t kk = 0; kk < s.modes.size(); ++kk) {
        const Mode& mk = s.modes[kk];
        b += occ[kk] * zt.scale3 * zt.x->value(mk.nx, mk.nx, ml.nx) *
             zt.y->value(mk.ny, mk.ny, ml.ny) *
             zt.z->value(mk.nz, mk.nz, ml.nz);
      }
      const double front =
          2.0 * pref * broadened_delta(s.exc[l] / c::hbar, gamma);
      out.plus += front * occ[l] * b * b;
      out.minus += front * (1.0 + occ[l]) * b * b;
    }
  }
  return out;
}

RatePair pair_rates(const TrapModel& trap, const SpectrumTable& spectrum,
                    const OverlapTable& overlaps,
                    const OccupationProfile& profile, const RateOptions& opt) {
  if (profile.occupation.size() != spectrum.size())
    throw StructuralError("rates: profile does not match the spectrum");
  const SourceSet s = build_sources(trap, spectrum, opt, RateMode::discrete);
  const ZetaEval zt = make_zeta(overlaps);
  check_range(s, zt);

  const double gamma = trap.gamma;
  const std::vector<double>& occ = profile.occupation;
  std::vector<double> part_p(s.n_class, 0.0), part_m(s.n_class, 0.0);
  parallel_for(static_cast<std::size_t>(s.n_class), opt.threads,
               [&](std::size_t item) {
    const int ci = static_cast<int>(item);
    double lp = 0, lm = 0;
    for (std::size_t i = s.cls_begin[ci]; i < s.cls_begin[ci + 1]; ++i) {
      const Mode& mi = s.modes[i];
      const std::uint8_t o = s.octant[i];
      const double* rx = zt.x->row(mi.nx, 0);
      const double* ry = zt.y->row(mi.ny, 0);
      const double* rz = zt.z->row(mi.nz, 0);
      for (int cj = ci; cj < s.n_class; ++cj) {
        const std::size_t b = static_cast<std::size_t>(cj) * 8 + o;
        std::size_t pos = s.bucket_off[b];
        const std::size_t pend = s.bucket_off[b + 1];
        if (cj == ci)
          pos = static_cast<std::size_t>(
              std::lower_bound(s.bucket_modes.begin() + pos,
                               s.bucket_modes.begin() + pend,
                               static_cast<std::uint32_t>(i)) -
              s.bucket_modes.begin());
        for (; pos < pend; ++pos) {
          const std::uint32_t j = s.bucket_modes[pos];
          const Mode& mj = s.modes[j];
          const double zeta = zt.scale3 * rx[mj.nx] * ry[mj.ny] * rz[mj.nz];
          const double wz = (j == i ? 1.0 : 2.0) * zeta * zeta *
              broadened_delta((s.exc[i] + s.exc[j]) / c::hbar, gamma);
          lp += wz * occ[i] * occ[j];
          lm += wz * (1.0 + occ[i]) * (1.0 + occ[j]);
        }
      }
    }
    part_p[item] = lp;
    part_m[item] = lm;
  });

  RatePair out;
  for (int ci = 0; ci < s.n_class; ++ci) {
    out.plus += part_p[ci];
    out.minus += part_m[ci];
  }
  const double pref = pair_prefactor(trap);
  out.plus *= pref;
  out.minus *= pref;
  return out;
}

RateTable build_rate_table(const TrapModel& trap, const SpectrumTable& spectrum,
                           const OverlapTable& overlaps,
                           const RateOptions& opt, bool with_pair_rates) {
  if (trap.n_total < 1)
    throw ConfigError(std::string("rates: n_total must be at least 1"));
  const int n = trap.n_total;
  const double beta = trap.beta();

  const SourceSet s = build_sources(trap, spectrum, opt, opt.mode);
  const ZetaEval zt = make_zeta(overlaps);
  check_range(s, zt);
  const TripleKernel kernel = build_triple_kernel(trap, s, zt, opt);
  PairKernel pair;
  if (with_pair_rates) pair = build_pair_kernel(trap, s, zt, opt);
  SecondaryTerms sec;
  if (opt.include_secondary) sec = build_secondary(trap, s, zt);

  // Number-constraint levels: always the exact spectrum classes, full range.
  // Binned continuum levels cannot hold a supersaturated cloud (no positive
  // solution once n_perp exceeds the continuum capacity), while the discrete
  // constraint stays solvable with mu_perp between the ground and the first
  // excited level, which is what drives stimulated growth.
  std::vector<double> lev_e, lev_w;
  {
    EnergyClasses full = group_energies(spectrum);
    lev_e = full.energy;
    lev_w.assign(full.degeneracy.begin(), full.degeneracy.end());
  }

  RateTable t;
  t.n_total = n;
  t.temperature = trap.temperature;
  t.gamma = trap.gamma;
  t.mode = opt.mode;
  t.lambda_plus.assign(n + 1, 0.0);
  t.lambda_minus.assign(n + 1, 0.0);
  t.mu_perp.assign(n + 1, -std::numeric_limits<double>::infinity());
  std::vector<double> pp, pm;
  if (with_pair_rates) {
    pp.assign(n + 1, 0.0);
    pm.assign(n + 1, 0.0);
  }

  parallel_for(static_cast<std::size_t>(n) + 1, opt.threads,
               [&](std::size_t np) {
    std::vector<double> occ(s.n_class, 0.0);
    if (np > 0) {
      const double alpha = solve_alpha_on_levels(
          lev_e, lev_w, static_cast<double>(np), beta);
      if (opt.mode == RateMode::discrete) {
        for (int ci = 0; ci < s.n_class; ++ci)
          occ[ci] = bose_occupation(spectrum.ground_energy + s.cls_exc[ci],
                                    alpha, beta);
      } else {
        // Bin occupancy = average of the exact per-mode occupations inside
        // the bin. Evaluating the Bose factor at the bin center instead
        // breaks down when mu_perp sits above the center of the lowest bins.
        for (int ci = 0; ci < s.n_class; ++ci) {
          double acc = 0;
          for (std::size_t i = s.cls_begin[ci]; i < s.cls_begin[ci + 1]; ++i)
            acc += bose_occupation(spectrum.ground_energy + s.exc[i], alpha,
                                   beta);
          occ[ci] = acc / static_cast<double>(s.cls_begin[ci + 1] -
                                              s.cls_begin[ci]);
        }
      }
      t.mu_perp[np] = -alpha / beta;
    }
    double lp = 0, lm = 0;
    for (const auto& e : kernel.entries) {
      const double ok = occ[e.ck], ol = occ[e.cl], om = occ[e.cm];
      lp += e.w * ok * ol * (1.0 + om);
      lm += e.w * (1.0 + ok) * (1.0 + ol) * om;
    }
    for (const auto& leg : sec.legs) {
      double b = 0;
      for (int ci = 0; ci < s.n_class; ++ci) b += occ[ci] * leg.a_class[ci];
      const double ol = occ[s.cls[leg.mode]];
      lp += leg.front * ol * b * b;
      lm += leg.front * (1.0 + ol) * b * b;
    }
    t.lambda_plus[np] = lp;
    t.lambda_minus[np] = lm;
    if (with_pair_rates) {
      double qp = 0, qm = 0;
      for (const auto& e : pair.entries) {
        qp += e.w * occ[e.ck] * occ[e.cl];
        qm += e.w * (1.0 + occ[e.ck]) * (1.0 + occ[e.cl]);
      }
      pp[np] = qp;
      pm[np] = qm;
    }
  });

  // Each link n0 <-> n0+1 pairs its gain and loss legs at the common bath
  // number N - n0 (the lower state's n_perp). Evaluating the loss leg at its
  // own initial bath N - n0 - 1 instead tilts the stationary chain by
  // d ln(lambda-)/d n_perp per link, which wrecks the canonical agreement
  // and the fixed-point condition lambda+(N - <N0>) = lambda-(N - <N0>).
  t.xi_plus.assign(n + 1, 0.0);
  t.xi_minus.assign(n + 1, 0.0);
  for (int n0 = 0; n0 <= n; ++n0) {
    const int np = n - n0;
    t.xi_plus[n0] = 2.0 * (n0 + 1.0) * t.lambda_plus[np];
    if (n0 > 0)
      t.xi_minus[n0] = 2.0 * static_cast<double>(n0) * t.lambda_minus[np + 1];
  }
  if (with_pair_rates) {
    t.gamma_plus.assign(n + 1, 0.0);
    t.gamma_minus.assign(n + 1, 0.0);
    for (int n0 = 0; n0 <= n; ++n0) {
      const int np = n - n0;
      t.gamma_plus[n0] = (n0 + 1.0) * (n0 + 2.0) * pp[np];
      if (n0 > 1)
        t.gamma_minus[n0] =
            static_cast<double>(n0) * (n0 - 1.0) * pm[np + 2];
    }
  }
  return t;
}

std::vector<double> detailed_balance_residuals(const RateTable& t,
                                               const TrapModel& trap) {
  const double beta = trap.beta();
  const double mu0 = trap.ground_energy();
  std::vector<double> r(t.lambda_plus.size(),
                        std::numeric_limits<double>::quiet_NaN());
  for (std::size_t np = 1; np < r.size(); ++np) {
    const double lp = t.lambda_plus[np], lm = t.lambda_minus[np];
    if (!(lp > 0) || !(lm > 0)) continue;
    r[np] = std::exp(std::log(lp) - std::log(lm) -
                     beta * (t.mu_perp[np] - mu0)) -
            1.0;
  }
  return r;
}

}  // namespace becsim
