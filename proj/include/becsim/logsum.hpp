#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace becsim {

inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving the log domain.
inline double log_add(double a, double b) {
  if (a == log_zero) return b;
  if (b == log_zero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log(sum exp(x_i)), max extracted for stability. Empty input -> log(0).
inline double log_sum(const std::vector<double>& x) {
  double m = log_zero;
  for (double v : x) m = std::max(m, v);
  if (m == log_zero) return log_zero;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace becsim
