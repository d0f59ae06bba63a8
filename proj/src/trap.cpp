#include "becsim/trap.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"

namespace becsim {

namespace c = constants;

void TrapModel::validate() const {
  std::vector<std::string> bad;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
      bad.push_back(std::string(name) + " must be > 0");
  };
  positive(omega_x, "omega_x");
  positive(omega_y, "omega_y");
  positive(omega_z, "omega_z");
  positive(mass, "mass");
  positive(temperature, "temperature");
  positive(gamma, "gamma");
  positive(energy_cutoff, "energy_cutoff");
  if (!(scattering_length >= 0) || !std::isfinite(scattering_length))
    bad.push_back("scattering_length must be >= 0");
  if (n_total < 1) bad.push_back("n_total must be >= 1");
  if (!bad.empty()) throw ConfigError(bad);
}

double TrapModel::beta() const { return 1.0 / (c::kb * temperature); }

double TrapModel::ground_energy() const {
  return 0.5 * c::hbar * (omega_x + omega_y + omega_z);
}

double TrapModel::mean_omega() const {
  return std::cbrt(omega_x * omega_y * omega_z);
}

double TrapModel::coupling() const {
  return 4.0 * c::pi * scattering_length * c::hbar * c::hbar / mass;
}

double TrapModel::interaction_ratio() const {
  return scattering_length / std::sqrt(c::hbar / (mass * mean_omega()));
}

double kinetic_gamma_estimate(double scattering_length, double density,
                              double temperature, double mass) {
  double v = std::sqrt(3.0 * c::kb * temperature / mass);
  return scattering_length * scattering_length * density * v;
}

}  // namespace becsim
