#pragma once

namespace becsim {

// Gas of n_total identical bosons in an anisotropic 3D harmonic trap,
// weakly coupled to itself by s-wave contact interactions. Everything SI.
struct TrapModel {
  double omega_x = 0;  // rad/s
  double omega_y = 0;  // rad/s
  double omega_z = 0;  // rad/s
  double mass = 0;              // kg
  double scattering_length = 0; // m
  double temperature = 0;       // K
  double gamma = 0;             // 1/s, bath correlation decay rate
  int n_total = 0;
  double energy_cutoff = 12.0;  // spectrum truncation, units of kB*T

  // Throws ConfigError listing every violated constraint.
  void validate() const;

  double beta() const;           // 1/(kB T)
  double ground_energy() const;  // hbar*(wx+wy+wz)/2
  double mean_omega() const;     // geometric mean
  double coupling() const;       // 4 pi a hbar^2 / m, derived on demand
  // a / sqrt(hbar/(m*mean_omega)): dimensionless interaction-strength
  // diagnostic reported in run manifests, never used as a guard.
  double interaction_ratio() const;
};

// Kinetic estimate a^2 * density * v with v = sqrt(3 kB T / m): the
// collision-rate scale to compare a configured gamma against. density in
// 1/m^3, result in 1/s.
double kinetic_gamma_estimate(double scattering_length, double density,
                              double temperature, double mass);

}  // namespace becsim
