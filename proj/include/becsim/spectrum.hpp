#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "becsim/trap.hpp"

namespace becsim {

// One single-particle trap eigenstate. energy is absolute (zero point
// included), in joules.
struct Mode {
  int nx = 0, ny = 0, nz = 0;
  double energy = 0;
};

// All excited modes with excitation energy (energy - ground) at or below the
// cutoff, ascending in energy; exact float ties are ordered lexicographically
// by (nx, ny, nz). The condensate mode (0,0,0) is deliberately absent.
struct SpectrumTable {
  std::vector<Mode> modes;
  double ground_energy = 0;   // J
  double cutoff_energy = 0;   // J, threshold on energy - ground

  std::size_t size() const { return modes.size(); }
  // Largest 1D quantum number present on each axis.
  int max_nx() const;
  int max_ny() const;
  int max_nz() const;
};

// Enumerates the spectrum for trap.energy_cutoff * kB * T. Throws
// StructuralError if no excited mode survives, NumericError if the cutoff
// would enumerate an absurd number of modes.
SpectrumTable enumerate_modes(const TrapModel& trap);

// Modes grouped into degenerate energy classes (relative tolerance merge;
// Bose occupations depend on energy only, so per-class work replaces
// per-mode work in the hot paths).
struct EnergyClasses {
  std::vector<double> energy;        // absolute energy per class, ascending
  std::vector<int> degeneracy;       // modes per class
  std::vector<std::uint32_t> mode_class;  // spectrum index -> class index
};

EnergyClasses group_energies(const SpectrumTable& spectrum,
                             double rel_tol = 1e-9);

// Columns: index,nx,ny,nz,energy_joule,excitation_over_kbt
void write_spectrum_csv(const std::string& path, const SpectrumTable& spectrum,
                        double temperature);

}  // namespace becsim
