#include "becsim/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "becsim/errors.hpp"
#include "becsim/logsum.hpp"

namespace becsim {

double Distribution::mean() const {
  double m = 0;
  for (std::size_t i = 0; i < p.size(); ++i) m += static_cast<double>(i) * p[i];
  return m;
}

double Distribution::stddev() const {
  const double m = mean();
  double v = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(i) - m;
    v += d * d * p[i];
  }
  return std::sqrt(std::max(v, 0.0));
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.p.size() != b.p.size())
    throw StructuralError("total_variation: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::fabs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

namespace {

void check_table(const RateTable& r) {
  const std::size_t want = static_cast<std::size_t>(r.n_total) + 1;
  if (r.n_total < 1 || r.xi_plus.size() != want || r.xi_minus.size() != want)
    throw StructuralError("kinetics: malformed rate table");
  if (r.has_pair_rates() &&
      (r.gamma_plus.size() != want || r.gamma_minus.size() != want))
    throw StructuralError("kinetics: malformed pair rate table");
}

}  // namespace

void apply_generator(const RateTable& r, const std::vector<double>& p,
                     std::vector<double>& dpdt) {
  check_table(r);
  const int n = r.n_total;
  if (p.size() != static_cast<std::size_t>(n) + 1)
    throw StructuralError("apply_generator: state size mismatch");
  dpdt.assign(p.size(), 0.0);
  const bool pair = r.has_pair_rates();
  for (int i = 0; i <= n; ++i) {
    const double pi = p[i];
    if (i < n) {
      const double f = r.xi_plus[i] * pi;
      dpdt[i] -= f;
      dpdt[i + 1] += f;
    }
    if (i > 0) {
      const double f = r.xi_minus[i] * pi;
      dpdt[i] -= f;
      dpdt[i - 1] += f;
    }
    if (pair) {
      if (i + 2 <= n) {
        const double f = r.gamma_plus[i] * pi;
        dpdt[i] -= f;
        dpdt[i + 2] += f;
      }
      if (i >= 2) {
        const double f = r.gamma_minus[i] * pi;
        dpdt[i] -= f;
        dpdt[i - 2] += f;
      }
    }
  }
}

namespace {

// Clip tiny negative overshoot, track drift, renormalize. Returns the mass
// removed.
double clip_and_renormalize(std::vector<double>& y, double* max_drift) {
  double clipped = 0;
  double sum0 = 0;
  for (double v : y) sum0 += v;
  *max_drift = std::max(*max_drift, std::fabs(sum0 - 1.0));
  double sum = 0;
  for (double& v : y) {
    if (v < 0) {
      clipped -= v;
      v = 0;
    }
    sum += v;
  }
  if (!(sum > 0))
    throw NumericError("propagate: probability mass vanished");
  const double inv = 1.0 / sum;
  for (double& v : y) v *= inv;
  return clipped;
}

double error_norm(const std::vector<double>& err, const std::vector<double>& a,
                  const std::vector<double>& b, double abs_tol,
                  double rel_tol) {
  double acc = 0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double scale =
        abs_tol + rel_tol * std::max(std::fabs(a[i]), std::fabs(b[i]));
    const double q = err[i] / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

struct StepKinetics {
  const RateTable& rates;
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, err;

  explicit StepKinetics(const RateTable& r) : rates(r) {}

  void stage(const std::vector<double>& y, double h,
             const std::initializer_list<std::pair<const std::vector<double>*,
                                                   double>>& terms,
             std::vector<double>& k) {
    ytmp.assign(y.begin(), y.end());
    for (const auto& [v, c] : terms)
      for (std::size_t i = 0; i < ytmp.size(); ++i) ytmp[i] += h * c * (*v)[i];
    apply_generator(rates, ytmp, k);
  }

  // One Dormand-Prince attempt; ynew gets the 5th-order result, err the
  // embedded 4th-order difference.
  void attempt(const std::vector<double>& y, double h,
               std::vector<double>& ynew) {
    apply_generator(rates, y, k1);
    stage(y, h, {{&k1, 1.0 / 5}}, k2);
    stage(y, h, {{&k1, 3.0 / 40}, {&k2, 9.0 / 40}}, k3);
    stage(y, h, {{&k1, 44.0 / 45}, {&k2, -56.0 / 15}, {&k3, 32.0 / 9}}, k4);
    stage(y, h,
          {{&k1, 19372.0 / 6561},
           {&k2, -25360.0 / 2187},
           {&k3, 64448.0 / 6561},
           {&k4, -212.0 / 729}},
          k5);
    stage(y, h,
          {{&k1, 9017.0 / 3168},
           {&k2, -355.0 / 33},
           {&k3, 46732.0 / 5247},
           {&k4, 49.0 / 176},
           {&k5, -5103.0 / 18656}},
          k6);
    ynew.assign(y.begin(), y.end());
    for (std::size_t i = 0; i < y.size(); ++i)
      ynew[i] += h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                      125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                      11.0 / 84 * k6[i]);
    apply_generator(rates, ynew, k7);
    err.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      err[i] = h * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] +
                    71.0 / 1920 * k4[i] - 17253.0 / 339200 * k5[i] +
                    22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
  }
};

// Solves (I - h*A) x = rhs for the pentadiagonal generator matrix (banded LU
// without pivoting; the matrix is column diagonally dominant).
struct BackwardEulerSolver {
  const RateTable& rates;
  std::vector<double> d, s1, s2, u1, u2, x;

  explicit BackwardEulerSolver(const RateTable& r) : rates(r) {}

  void solve(const std::vector<double>& rhs, double h,
             std::vector<double>& out) {
    const int n = rates.n_total;
    const std::size_t m = rhs.size();
    d.assign(m, 1.0);
    s1.assign(m, 0.0);  // s1[j] = M[j+1][j]
    s2.assign(m, 0.0);  // s2[j] = M[j+2][j]
    u1.assign(m, 0.0);  // u1[j] = M[j][j+1]
    u2.assign(m, 0.0);  // u2[j] = M[j][j+2]
    const bool pair = rates.has_pair_rates();
    for (int j = 0; j <= n; ++j) {
      double out_rate = 0;
      if (j < n) {
        out_rate += rates.xi_plus[j];
        s1[j] = -h * rates.xi_plus[j];
      }
      if (j > 0) {
        out_rate += rates.xi_minus[j];
        u1[j - 1] = -h * rates.xi_minus[j];
      }
      if (pair) {
        if (j + 2 <= n) {
          out_rate += rates.gamma_plus[j];
          s2[j] = -h * rates.gamma_plus[j];
        }
        if (j >= 2) {
          out_rate += rates.gamma_minus[j];
          u2[j - 2] = -h * rates.gamma_minus[j];
        }
      }
      d[j] = 1.0 + h * out_rate;
    }

    x.assign(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < m; ++i) {
      const double piv = d[i];
      if (!(std::fabs(piv) > 0))
        throw NumericError("propagate: singular implicit step");
      if (i + 1 < m) {
        const double f = s1[i] / piv;
        d[i + 1] -= f * u1[i];
        if (i + 2 < m) u1[i + 1] -= f * u2[i];
        x[i + 1] -= f * x[i];
      }
      if (i + 2 < m) {
        const double f = s2[i] / piv;
        s1[i + 1] -= f * u1[i];
        d[i + 2] -= f * u2[i];
        x[i + 2] -= f * x[i];
      }
    }
    out.resize(m);
    for (std::size_t ri = m; ri-- > 0;) {
      double v = x[ri];
      if (ri + 1 < m) v -= u1[ri] * out[ri + 1];
      if (ri + 2 < m) v -= u2[ri] * out[ri + 2];
      out[ri] = v / d[ri];
    }
  }
};

}  // namespace

Trajectory propagate(const RateTable& rates, const Distribution& initial,
                     const PropagateOptions& opt) {
  check_table(rates);
  if (!(opt.t_final > 0))
    throw ConfigError(std::string("propagate: t_final must be positive"));
  if (opt.output_points < 2)
    throw ConfigError(std::string("propagate: output_points must be at least 2"));
  if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0))
    throw ConfigError(std::string("propagate: tolerances must be positive"));
  const std::size_t m = static_cast<std::size_t>(rates.n_total) + 1;
  if (initial.p.size() != m)
    throw StructuralError("propagate: initial state size mismatch");
  double sum0 = 0;
  for (double v : initial.p) {
    if (v < 0) throw StructuralError("propagate: negative initial probability");
    sum0 += v;
  }
  if (std::fabs(sum0 - 1.0) > 1e-6)
    throw StructuralError("propagate: initial state is not normalized");

  Trajectory traj;
  traj.times.resize(opt.output_points);
  for (int i = 0; i < opt.output_points; ++i)
    traj.times[i] =
        opt.t_final * static_cast<double>(i) / (opt.output_points - 1);

  std::vector<double> y(initial.p);
  for (double& v : y) v /= sum0;

  auto emit = [&](std::size_t row) {
    Distribution snap{y};
    traj.mean.push_back(snap.mean());
    traj.stddev.push_back(snap.stddev());
    if (opt.snapshot_stride > 0 &&
        row % static_cast<std::size_t>(opt.snapshot_stride) == 0) {
      traj.snapshot_rows.push_back(row);
      traj.snapshots.push_back(y);
    }
  };
  emit(0);

  const double h_min = 1e-14 * opt.t_final;
  double t = 0;
  double h = 1e-6 * opt.t_final;
  std::vector<double> ynew;
  StepKinetics rk(rates);
  BackwardEulerSolver be(rates);
  std::vector<double> half, full, err;

  for (int row = 1; row < opt.output_points; ++row) {
    const double t_target = traj.times[row];
    while (t < t_target) {
      h = std::min(h, t_target - t);
      if (h < h_min)
        throw NumericError(
            "propagate: step size underflow (stiff table; integrator=bdf "
            "may help)");
      double enorm;
      if (opt.integrator == Integrator::rk45) {
        rk.attempt(y, h, ynew);
        enorm = error_norm(rk.err, y, ynew, opt.abs_tol, opt.rel_tol);
      } else {
        be.solve(y, h, full);
        be.solve(y, 0.5 * h, half);
        be.solve(half, 0.5 * h, half);
        err.resize(m);
        for (std::size_t i = 0; i < m; ++i) err[i] = half[i] - full[i];
        enorm = error_norm(err, y, half, opt.abs_tol, opt.rel_tol);
        ynew.resize(m);
        for (std::size_t i = 0; i < m; ++i)
          ynew[i] = 2.0 * half[i] - full[i];
      }
      const double order = opt.integrator == Integrator::rk45 ? 5.0 : 2.0;
      double factor =
          0.9 * std::pow(std::max(enorm, 1e-10), -1.0 / order);
      if (enorm <= 1.0) {
        t += h;
        y.swap(ynew);
        traj.clipped_mass += clip_and_renormalize(y, &traj.max_norm_drift);
        if (traj.clipped_mass > opt.clip_budget)
          throw NumericError(
              "propagate: clipped probability exceeds the budget; tighten "
              "the tolerances");
        ++traj.accepted_steps;
        h *= std::clamp(factor, 0.2, 5.0);
      } else {
        ++traj.rejected_steps;
        h *= std::clamp(factor, 0.1, 0.9);
      }
      if (t_target - t < h_min) t = t_target;  // snap out float residue
    }
    emit(static_cast<std::size_t>(row));
  }

  traj.final_state.p = y;
  return traj;
}

Distribution steady_state(const RateTable& rates) {
  check_table(rates);
  const int n = rates.n_total;
  std::vector<double> lnp(static_cast<std::size_t>(n) + 1, log_zero);
  lnp[0] = 0.0;
  for (int z = 1; z <= n; ++z) {
    const double up = rates.xi_plus[z - 1];
    const double down = rates.xi_minus[z];
    if (!(down > 0)) {
      if (z == n) break;  // quasi-absorbing top state keeps zero weight
      throw StructuralError(
          "steady_state: xi_minus vanishes at interior state " +
          std::to_string(z));
    }
    if (!(up > 0)) break;  // states above are unreachable, stay at zero
    lnp[z] = lnp[z - 1] + std::log(up) - std::log(down);
  }
  const double norm = log_sum(lnp);
  Distribution out;
  out.p.resize(lnp.size());
  for (std::size_t i = 0; i < lnp.size(); ++i)
    out.p[i] = std::exp(lnp[i] - norm);
  return out;
}

std::vector<double> mean_growth(const RateTable& rates, double n0_start,
                                const std::vector<double>& times) {
  check_table(rates);
  const double top = static_cast<double>(rates.n_total);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && times[i] <= times[i - 1]))
      throw ConfigError(std::string("mean_growth: times must ascend from >= 0"));
  }
  auto interp = [&](const std::vector<double>& a, double x) {
    const double xc = std::clamp(x, 0.0, top);
    const std::size_t i =
        std::min(static_cast<std::size_t>(xc), a.size() - 2);
    const double f = xc - static_cast<double>(i);
    return a[i] * (1.0 - f) + a[i + 1] * f;
  };
  // drift = xi+(x) - xi-(x+1): the gain out of x and the loss back from the
  // state above, so the zero sits exactly on lambda+(N-x) = lambda-(N-x)
  auto rhs = [&](double x) {
    return interp(rates.xi_plus, x) - interp(rates.xi_minus, x + 1.0);
  };

  std::vector<double> out;
  out.reserve(times.size());
  double x = std::clamp(n0_start, 0.0, top);
  double t = 0;
  const double t_end = times.empty() ? 0.0 : times.back();
  double h = t_end > 0 ? 1e-6 * t_end : 1.0;
  const double rel = 1e-10, abs_sc = 1e-12 * std::max(top, 1.0);

  for (double t_target : times) {
    while (t < t_target) {
      h = std::min(h, t_target - t);
      // Bogacki-Shampine 3(2) pair on the scalar equation
      const double k1 = rhs(x);
      const double k2 = rhs(x + 0.5 * h * k1);
      const double k3 = rhs(x + 0.75 * h * k2);
      const double x3 = x + h * (2.0 / 9 * k1 + 1.0 / 3 * k2 + 4.0 / 9 * k3);
      const double k4 = rhs(x3);
      const double x2 = x + h * (7.0 / 24 * k1 + 0.25 * k2 + 1.0 / 3 * k3 +
                                 0.125 * k4);
      const double scale = abs_sc + rel * std::max(std::fabs(x), std::fabs(x3));
      const double enorm = std::fabs(x3 - x2) / scale;
      const double factor = 0.9 * std::pow(std::max(enorm, 1e-10), -1.0 / 3);
      if (enorm <= 1.0) {
        t += h;
        x = std::clamp(x3, 0.0, top);
        h *= std::clamp(factor, 0.2, 5.0);
      } else {
        h *= std::clamp(factor, 0.1, 0.9);
      }
      if (t_target - t < 1e-14 * std::max(t_end, 1.0)) t = t_target;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace becsim
