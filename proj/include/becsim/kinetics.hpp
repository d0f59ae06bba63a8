#pragma once

#include <cstddef>
#include <vector>

#include "becsim/rates.hpp"

namespace becsim {

// Probability distribution over the condensate occupation N0 = 0..N.
struct Distribution {
  std::vector<double> p;

  double mean() const;
  double stddev() const;
};

// (1/2) sum |a - b|
double total_variation(const Distribution& a, const Distribution& b);

// dp/dt of the birth-death master equation defined by the xi rates (and the
// two-step gamma rates when the table carries them). Written in flux form so
// probability is conserved to rounding, and the ladder ends are closed in
// code regardless of what the boundary table entries hold.
void apply_generator(const RateTable& rates, const std::vector<double>& p,
                     std::vector<double>& dpdt);

enum class Integrator { rk45, bdf };

struct PropagateOptions {
  Integrator integrator = Integrator::rk45;
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  double t_final = 0;      // s
  int output_points = 200; // rows in the trajectory, endpoints included
  int snapshot_stride = 0; // full distribution every k-th row; 0 = never
  // Upper bound on total negative probability mass removed by clipping over
  // the whole run; exceeding it aborts with NumericError since it means the
  // tolerances are too loose for the table.
  double clip_budget = 1e-8;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> mean, stddev;
  std::vector<std::size_t> snapshot_rows;  // indices into times
  std::vector<std::vector<double>> snapshots;
  double clipped_mass = 0;
  double max_norm_drift = 0;  // largest |sum p - 1| seen before renormalizing
  long accepted_steps = 0;
  long rejected_steps = 0;
  Distribution final_state;
};

// Integrates the master equation from `initial` to t_final, reporting on a
// uniform output grid. rk45 is adaptive Dormand-Prince; bdf is adaptive
// backward Euler with Richardson control for tables too stiff for the
// explicit method.
Trajectory propagate(const RateTable& rates, const Distribution& initial,
                     const PropagateOptions& opt);

// Stationary distribution of the single-particle ladder from the
// detailed-balance chain, evaluated in logs (pair rates, if present, are not
// part of the chain and are ignored). A vanishing interior downward rate is
// a StructuralError naming the state; a vanishing top one makes N0 = N a
// quasi-absorbing artifact and that state gets probability zero.
Distribution steady_state(const RateTable& rates);

// Deterministic growth curve dx/dt = xi_plus(x) - xi_minus(x+1), with the
// tables interpolated linearly between integer occupations. Returns x at the
// requested times; times must ascend from >= 0.
std::vector<double> mean_growth(const RateTable& rates, double n0_start,
                                const std::vector<double>& times);

}  // namespace becsim
