#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "becsim/canonical.hpp"
#include "becsim/errors.hpp"
#include "becsim/kinetics.hpp"
#include "becsim/overlap.hpp"
#include "becsim/rates.hpp"
#include "becsim/spectrum.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace becsim;

namespace {

// Bare birth-death ladder for closed-form and linear-algebra checks; the
// physics fields stay at their defaults because kinetics never reads them.
RateTable chain_table(std::vector<double> xi_plus,
                      std::vector<double> xi_minus) {
  RateTable t;
  t.n_total = static_cast<int>(xi_plus.size()) - 1;
  t.xi_plus = std::move(xi_plus);
  t.xi_minus = std::move(xi_minus);
  return t;
}

RateTable physical_table(int n_total = 40, double temperature_nk = 14.0) {
  TrapModel trap = oracles::desk_trap(n_total, temperature_nk, 8.0);
  SpectrumTable s = enumerate_modes(trap);
  OverlapTable overlaps(trap, s);
  return build_rate_table(trap, s, overlaps);
}

}  // namespace

TEST_CASE("distribution moments come out right") {
  Distribution d{{0.25, 0.0, 0.75}};
  CHECK(d.mean() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(d.stddev() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
  Distribution e{{1.0, 0.0}};
  CHECK_THROWS_AS(total_variation(d, e), StructuralError);
  CHECK(total_variation(d, d) == 0.0);
}

TEST_CASE("two-state relaxation follows the closed form") {
  const double u = 3.0, dn = 7.0;
  RateTable t = chain_table({u, 0.0}, {0.0, dn});
  Distribution init{{1.0, 0.0}};
  const double p_inf = u / (u + dn);

  for (Integrator integ : {Integrator::rk45, Integrator::bdf}) {
    PropagateOptions opt;
    opt.integrator = integ;
    opt.t_final = 1.0;
    opt.output_points = 21;
    opt.rel_tol = 1e-10;
    Trajectory traj = propagate(t, init, opt);
    REQUIRE(traj.times.size() == 21);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double want =
          p_inf * (1.0 - std::exp(-(u + dn) * traj.times[i]));
      CHECK(traj.mean[i] == doctest::Approx(want).epsilon(5e-7));
    }
    CHECK(traj.final_state.p[1] ==
          doctest::Approx(p_inf * (1.0 - std::exp(-(u + dn)))).epsilon(5e-7));
  }

  Distribution steady = steady_state(t);
  CHECK(steady.p[1] == doctest::Approx(p_inf).epsilon(1e-14));
}

TEST_CASE("generator columns conserve probability") {
  RateTable t = chain_table({2.0, 5.0, 1.0, 0.0}, {0.0, 3.0, 4.0, 6.0});
  t.gamma_plus = {0.5, 0.25, 0.0, 0.0};
  t.gamma_minus = {0.0, 0.0, 0.75, 1.5};
  const int dim = t.n_total + 1;
  std::vector<double> e(dim, 0.0), col(dim);
  for (int j = 0; j < dim; ++j) {
    e[j] = 1.0;
    apply_generator(t, e, col);
    double sum = 0, scale = 0;
    for (double v : col) {
      sum += v;
      scale = std::max(scale, std::fabs(v));
    }
    CHECK(std::fabs(sum) <= 1e-15 * std::max(scale, 1.0));
    e[j] = 0.0;
  }
  // a mixed state conserves as well
  std::vector<double> p(dim, 1.0 / dim), dpdt;
  apply_generator(t, p, dpdt);
  double sum = 0;
  for (double v : dpdt) sum += v;
  CHECK(std::fabs(sum) <= 1e-15);
}

TEST_CASE("pair flows enter the generator two steps at a time") {
  RateTable t = chain_table({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
  t.gamma_plus = {2.0, 9.0, 0.0};  // the middle entry cannot fire, 3 > n
  t.gamma_minus = {0.0, 0.0, 5.0};
  std::vector<double> p = {1.0, 0.0, 0.0}, dpdt;
  apply_generator(t, p, dpdt);
  CHECK(dpdt[0] == doctest::Approx(-2.0));
  CHECK(dpdt[1] == 0.0);
  CHECK(dpdt[2] == doctest::Approx(2.0));
  p = {0.0, 1.0, 0.0};
  apply_generator(t, p, dpdt);  // gamma_plus[1] would overflow the ladder
  for (double v : dpdt) CHECK(v == 0.0);
  p = {0.0, 0.0, 1.0};
  apply_generator(t, p, dpdt);
  CHECK(dpdt[2] == doctest::Approx(-5.0));
  CHECK(dpdt[0] == doctest::Approx(5.0));
}

TEST_CASE("chain steady state matches the dense null space") {
  // arbitrary strictly positive ladder
  std::vector<double> up(10), down(10);
  for (int i = 0; i < 10; ++i) {
    up[i] = 1.0 + 0.8 * std::sin(0.9 * i + 0.3) * std::sin(0.9 * i + 0.3);
    down[i] = 0.5 + 0.6 * std::cos(1.7 * i) * std::cos(1.7 * i);
  }
  up[9] = 0.0;
  down[0] = 0.0;
  RateTable t = chain_table(up, down);
  Distribution chain = steady_state(t);
  std::vector<double> kernel = oracles::nullspace_distribution(t);
  CHECK(oracles::total_variation_vec(chain.p, kernel) < 1e-12);

  // and on a physically built ladder
  RateTable phys = physical_table(12);
  Distribution chain_p = steady_state(phys);
  std::vector<double> kernel_p = oracles::nullspace_distribution(phys);
  CHECK(oracles::total_variation_vec(chain_p.p, kernel_p) < 1e-10);
}

TEST_CASE("steady state flags a broken interior link") {
  RateTable t = chain_table({1.0, 1.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 1.0});
  CHECK_THROWS_WITH_AS(steady_state(t),
                       doctest::Contains("interior state 2"), StructuralError);
}

TEST_CASE("unreachable and quasi-absorbing edges keep zero weight") {
  // link 2 -> 3 severed: everything above stays empty
  RateTable cut = chain_table({2.0, 3.0, 0.0, 1.0, 0.0},
                              {0.0, 1.0, 2.0, 1.0, 1.0});
  Distribution p = steady_state(cut);
  CHECK(p.p[3] == 0.0);
  CHECK(p.p[4] == 0.0);
  double sum = 0;
  for (double v : p.p) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

  // top state with no way back down keeps zero weight instead of throwing
  RateTable top = chain_table({2.0, 3.0, 1.0, 0.0}, {0.0, 1.0, 2.0, 0.0});
  Distribution q = steady_state(top);
  CHECK(q.p[3] == 0.0);
  CHECK(q.p[1] / q.p[0] == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("propagation conserves mass within the advertised budgets") {
  RateTable t = physical_table(40);
  Distribution init;
  init.p.assign(41, 0.0);
  init.p[0] = 1.0;
  PropagateOptions opt;
  opt.t_final = 40.0;
  opt.output_points = 50;
  Trajectory traj = propagate(t, init, opt);
  CHECK(traj.max_norm_drift <= 1e-9);
  CHECK(traj.clipped_mass <= 1e-8);
  CHECK(traj.accepted_steps > 0);
  CHECK(traj.final_state.p.size() == 41);
  CHECK(traj.mean.back() > 0.0);
  CHECK(traj.mean.back() < 40.0);
  // long-time state sits on the stationary chain
  Distribution steady = steady_state(t);
  CHECK(total_variation(traj.final_state, steady) < 1e-6);
}

TEST_CASE("explicit and implicit integrators land on the same state") {
  RateTable t = physical_table(30);
  Distribution init;
  init.p.assign(31, 0.0);
  init.p[0] = 1.0;
  PropagateOptions rk;
  rk.t_final = 5.0;
  PropagateOptions be;
  be.t_final = 5.0;
  be.integrator = Integrator::bdf;
  Trajectory a = propagate(t, init, rk);
  Trajectory b = propagate(t, init, be);
  CHECK(total_variation(a.final_state, b.final_state) < 1e-5);
}

TEST_CASE("snapshots land on the requested stride") {
  RateTable t = chain_table({1.0, 1.0, 0.0}, {0.0, 1.0, 1.0});
  Distribution init{{1.0, 0.0, 0.0}};
  PropagateOptions opt;
  opt.t_final = 2.0;
  opt.output_points = 10;
  opt.snapshot_stride = 3;
  Trajectory traj = propagate(t, init, opt);
  REQUIRE(traj.snapshot_rows.size() == 4);
  CHECK(traj.snapshot_rows[0] == 0);
  CHECK(traj.snapshot_rows[1] == 3);
  CHECK(traj.snapshot_rows[2] == 6);
  CHECK(traj.snapshot_rows[3] == 9);
  for (const auto& snap : traj.snapshots) {
    double sum = 0;
    for (double v : snap) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(2.0));
}

TEST_CASE("propagate validates its inputs") {
  RateTable t = chain_table({1.0, 0.0}, {0.0, 1.0});
  Distribution good{{1.0, 0.0}};
  PropagateOptions opt;
  opt.t_final = 0.0;
  CHECK_THROWS_AS(propagate(t, good, opt), ConfigError);
  opt.t_final = 1.0;
  opt.output_points = 1;
  CHECK_THROWS_AS(propagate(t, good, opt), ConfigError);
  opt.output_points = 5;
  opt.rel_tol = 0.0;
  CHECK_THROWS_AS(propagate(t, good, opt), ConfigError);
  opt.rel_tol = 1e-8;
  Distribution wrong_size{{1.0, 0.0, 0.0}};
  CHECK_THROWS_AS(propagate(t, wrong_size, opt), StructuralError);
  Distribution negative{{1.5, -0.5}};
  CHECK_THROWS_AS(propagate(t, negative, opt), StructuralError);
  Distribution unnormalized{{0.4, 0.2}};
  CHECK_THROWS_AS(propagate(t, unnormalized, opt), StructuralError);
}

TEST_CASE("mean growth relaxes onto the balanced-rate fixed point") {
  // condensed side of the transition so the drift zero sits well inside the
  // ladder instead of clamping at zero
  RateTable t = physical_table(40, 6.0);
  std::vector<double> times;
  for (int i = 0; i <= 60; ++i) times.push_back(0.5 * i);
  std::vector<double> x = mean_growth(t, 0.0, times);
  REQUIRE(x.size() == times.size());
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    CHECK(x[i] <= x[i + 1] + 1e-9);  // monotone approach from below
  const double x_end = x.back();
  // locate the drift zero independently: bisect xi+(x) - xi-(x+1) under the
  // same linear interpolation the integrator uses
  auto interp = [&](const std::vector<double>& a, double v) {
    const double vc = std::clamp(v, 0.0, static_cast<double>(t.n_total));
    const std::size_t i = std::min(static_cast<std::size_t>(vc), a.size() - 2);
    const double f = vc - static_cast<double>(i);
    return a[i] * (1.0 - f) + a[i + 1] * f;
  };
  auto drift = [&](double v) {
    return interp(t.xi_plus, v) - interp(t.xi_minus, v + 1.0);
  };
  double lo = 0.0;
  double hi = static_cast<double>(t.n_total);
  REQUIRE(drift(lo) > 0.0);
  REQUIRE(drift(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (drift(mid) > 0.0 ? lo : hi) = mid;
  }
  const double x_star = 0.5 * (lo + hi);
  CHECK(std::fabs(x_end - x_star) < 1e-6 * t.n_total);
  // the zero falls on the link where the per-atom rates cross balance
  const int below = static_cast<int>(std::floor(x_star));
  const int np_lo = t.n_total - below;  // left end of the link: growth wins
  const int np_hi = np_lo - 1;          // right end: decay wins
  CHECK(t.lambda_plus[np_lo] >= t.lambda_minus[np_lo]);
  CHECK(t.lambda_plus[np_hi] <= t.lambda_minus[np_hi]);
  // and sits near the stationary mean
  Distribution steady = steady_state(t);
  CHECK(std::fabs(x_end - steady.mean()) < 0.05 * t.n_total);
}

TEST_CASE("mean growth validates its time grid") {
  RateTable t = chain_table({1.0, 0.0}, {0.0, 1.0});
  CHECK_THROWS_AS(mean_growth(t, 0.0, {0.0, 1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(mean_growth(t, 0.0, {-1.0, 1.0}), ConfigError);
  std::vector<double> ok = mean_growth(t, 5.0, {0.0});
  CHECK(ok[0] == 1.0);  // start clamps onto the ladder
}
