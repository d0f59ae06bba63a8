#include "becsim/overlap.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"

namespace becsim {

namespace c = constants;

GaussHermiteRule gauss_hermite(int point_count) {
  if (point_count < 1) throw NumericError("gauss_hermite: need >= 1 point");
  // Golub-Welsch on the Jacobi matrix of the Hermite recurrence.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(point_count);
  Eigen::VectorXd sub(point_count - 1 > 0 ? point_count - 1 : 0);
  for (int k = 1; k < point_count; ++k) sub[k - 1] = std::sqrt(0.5 * k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericError("gauss_hermite: eigensolver failed");

  GaussHermiteRule rule;
  rule.nodes.resize(point_count);
  rule.weights.resize(point_count);
  // Weights via the Christoffel function 1/sum_k h_k(x)^2 over the
  // orthonormal polynomials. The usual eigenvector route loses the extreme
  // weights to roundoff (their first components sit far below the noise
  // floor), which poisons high-order product integrals evaluated without
  // their Gaussian.
  const double h0 = std::pow(c::pi, -0.25);
  for (int i = 0; i < point_count; ++i) {
    const double x = solver.eigenvalues()[i];
    rule.nodes[i] = x;
    if (x * x > 700.0) {
      rule.weights[i] = 0.0;  // true weight underflows double anyway
      continue;
    }
    double prev = h0, cur = std::sqrt(2.0) * x * h0;
    double ssum = prev * prev;
    for (int k = 1; k < point_count; ++k) {
      ssum += cur * cur;
      const double next = x * std::sqrt(2.0 / (k + 1)) * cur -
                          std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
    }
    rule.weights[i] = 1.0 / ssum;
  }
  return rule;
}

AxisOverlapTable::AxisOverlapTable(int n_max, int node_count) : n_max_(n_max) {
  if (n_max < 0) throw NumericError("AxisOverlapTable: negative n_max");
  stride_ = static_cast<std::size_t>(n_max) + 1;
  const int points = node_count > 0 ? node_count : 2 * n_max + 2;
  GaussHermiteRule rule = gauss_hermite(points);

  // The product of four eigenfunctions carries exp(-2 xi^2); substituting
  // u = sqrt(2) xi reduces it to the exp(-u^2) weight at the cost of an
  // overall 1/sqrt(2). psi_n below is the Gaussian-free remainder of the
  // normalized eigenfunction, built with the stable normalized recurrence.
  std::vector<double> psi(stride_ * points);
  const double norm0 = std::pow(c::pi, -0.25);
  for (int i = 0; i < points; ++i) {
    const double xi = rule.nodes[i] / std::sqrt(2.0);
    psi[0 * points + i] = norm0;
    if (n_max_ >= 1) psi[1 * points + i] = std::sqrt(2.0) * xi * norm0;
    for (int n = 1; n < n_max_; ++n) {
      psi[(n + 1) * points + i] =
          xi * std::sqrt(2.0 / (n + 1)) * psi[n * points + i] -
          std::sqrt(static_cast<double>(n) / (n + 1)) * psi[(n - 1) * points + i];
    }
  }

  table_.assign(stride_ * stride_ * stride_, 0.0);
  const double front = 1.0 / std::sqrt(2.0);
  for (int a = 0; a <= n_max_; ++a) {
    for (int b = a; b <= n_max_; ++b) {
      for (int cc = b; cc <= n_max_; ++cc) {
        if ((a + b + cc) % 2 != 0) continue;  // odd integrand
        double acc = 0.0;
        const double* pa = &psi[static_cast<std::size_t>(a) * points];
        const double* pb = &psi[static_cast<std::size_t>(b) * points];
        const double* pc = &psi[static_cast<std::size_t>(cc) * points];
        const double* p0 = &psi[0];
        for (int i = 0; i < points; ++i)
          acc += rule.weights[i] * pa[i] * pb[i] * pc[i] * p0[i];
        acc *= front;
        // symmetric in all three indices
        const std::size_t s = stride_;
        std::size_t ia = a, ib = b, ic = cc;
        table_[(ia * s + ib) * s + ic] = acc;
        table_[(ia * s + ic) * s + ib] = acc;
        table_[(ib * s + ia) * s + ic] = acc;
        table_[(ib * s + ic) * s + ia] = acc;
        table_[(ic * s + ia) * s + ib] = acc;
        table_[(ic * s + ib) * s + ia] = acc;
      }
    }
  }
}

OverlapTable::OverlapTable(const TrapModel& trap, const SpectrumTable& spectrum,
                           int node_count) {
  build(trap, spectrum.max_nx(), spectrum.max_ny(), spectrum.max_nz(),
        node_count);
}

OverlapTable::OverlapTable(const TrapModel& trap, int nx_max, int ny_max,
                           int nz_max, int node_count) {
  build(trap, nx_max, ny_max, nz_max, node_count);
}

void OverlapTable::build(const TrapModel& trap, int nx_max, int ny_max,
                         int nz_max, int node_count) {
  const double omega[3] = {trap.omega_x, trap.omega_y, trap.omega_z};
  limit_ = {nx_max, ny_max, nz_max};
  for (int ax = 0; ax < 3; ++ax)
    scale_[ax] = std::sqrt(trap.mass * omega[ax] / c::hbar);

  // Axes with equal frequency share one table sized for the larger limit.
  for (int ax = 0; ax < 3; ++ax) {
    int found = -1;
    for (int prev = 0; prev < ax; ++prev) {
      if (omega[prev] == omega[ax] && limit_[prev] >= limit_[ax]) {
        found = prev;
        break;
      }
    }
    if (found >= 0) {
      axis_[ax] = axis_[found];
    } else {
      tables_.push_back(
          std::make_unique<AxisOverlapTable>(limit_[ax], node_count));
      axis_[ax] = tables_.back().get();
    }
  }
}

double OverlapTable::axis_integral(int axis, int a, int b, int c) const {
  return scale_[axis] * axis_[axis]->value(a, b, c);
}

double OverlapTable::overlap(const Mode& a, const Mode& b,
                             const Mode& c) const {
  if (a.nx > limit_[0] || b.nx > limit_[0] || c.nx > limit_[0] ||
      a.ny > limit_[1] || b.ny > limit_[1] || c.ny > limit_[1] ||
      a.nz > limit_[2] || b.nz > limit_[2] || c.nz > limit_[2])
    throw StructuralError("overlap: quantum number outside the table range");
  double v = scale_[0] * axis_[0]->value(a.nx, b.nx, c.nx);
  v *= scale_[1] * axis_[1]->value(a.ny, b.ny, c.ny);
  v *= scale_[2] * axis_[2]->value(a.nz, b.nz, c.nz);
  return v;
}

double OverlapTable::overlap_indexed(const SpectrumTable& spectrum,
                                     std::size_t k, std::size_t l,
                                     std::size_t m) const {
  if (k >= spectrum.size() || l >= spectrum.size() || m >= spectrum.size())
    throw StructuralError("overlap_indexed: mode index out of range");
  return overlap(spectrum.modes[k], spectrum.modes[l], spectrum.modes[m]);
}

}  // namespace becsim
