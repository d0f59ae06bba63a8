#pragma once

namespace becsim::constants {

// CODATA 2018 values, SI units.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double kb = 1.380649e-23;           // J/K (exact)
inline constexpr double amu = 1.66053906892e-27;     // kg
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double zeta3 = 1.2020569031595942854;  // Riemann zeta(3)

}  // namespace becsim::constants
