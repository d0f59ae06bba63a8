#pragma once

#include <array>
#include <memory>
#include <vector>

#include "becsim/spectrum.hpp"
#include "becsim/trap.hpp"

namespace becsim {

// Nodes/weights for integration against exp(-u^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int point_count);

// Dense table of the dimensionless 1D integrals
//   J(a,b,c) = integral phi_a(x) phi_b(x) phi_c(x) phi_0(x) dx
// over unit-frequency oscillator eigenfunctions phi_n. Zero unless a+b+c is
// even. The default node count 2*n_max+2 makes the quadrature exact for the
// polynomial degree that can appear (3*n_max); a larger count can be forced
// for convergence checks.
class AxisOverlapTable {
 public:
  explicit AxisOverlapTable(int n_max, int node_count = 0);
  double value(int a, int b, int c) const {
    return table_[(static_cast<std::size_t>(a) * stride_ + b) * stride_ + c];
  }
  // Contiguous slice value(a, b, 0..n_max) for loops over the third index.
  const double* row(int a, int b) const {
    return &table_[(static_cast<std::size_t>(a) * stride_ + b) * stride_];
  }
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::size_t stride_;
  std::vector<double> table_;
};

// Quartic mode overlaps with one condensate leg:
//   overlap(a,b,c) = integral chi_0 chi_a chi_b chi_c d^3r   [m^-3]
// where chi_n are the trap eigenfunctions. Fully symmetric in (a,b,c); the
// condensate mode itself is a valid argument (all-zero quantum numbers).
// Tables are filled once at construction; lookups are const and safe to use
// from many threads.
class OverlapTable {
 public:
  OverlapTable(const TrapModel& trap, const SpectrumTable& spectrum,
               int node_count = 0);
  OverlapTable(const TrapModel& trap, int nx_max, int ny_max, int nz_max,
               int node_count = 0);

  double overlap(const Mode& a, const Mode& b, const Mode& c) const;
  double overlap_indexed(const SpectrumTable& spectrum, std::size_t k,
                         std::size_t l, std::size_t m) const;

  // Per-axis 1D integral including the sqrt(m*omega/hbar) length scale.
  double axis_integral(int axis, int a, int b, int c) const;

  // Raw pieces for hot loops that compose many per-axis lookups themselves.
  const AxisOverlapTable& axis_table(int axis) const { return *axis_[axis]; }
  double axis_scale(int axis) const { return scale_[axis]; }

 private:
  void build(const TrapModel& trap, int nx_max, int ny_max, int nz_max,
             int node_count);
  std::array<int, 3> limit_;
  std::array<double, 3> scale_;                    // sqrt(m*omega_i/hbar)
  std::array<const AxisOverlapTable*, 3> axis_{};  // views into tables_
  std::vector<std::unique_ptr<AxisOverlapTable>> tables_;
};

}  // namespace becsim
