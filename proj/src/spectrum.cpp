#include "becsim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "becsim/constants.hpp"
#include "becsim/csv.hpp"
#include "becsim/errors.hpp"

namespace becsim {

namespace c = constants;

int SpectrumTable::max_nx() const {
  int m = 0;
  for (const auto& md : modes) m = std::max(m, md.nx);
  return m;
}
int SpectrumTable::max_ny() const {
  int m = 0;
  for (const auto& md : modes) m = std::max(m, md.ny);
  return m;
}
int SpectrumTable::max_nz() const {
  int m = 0;
  for (const auto& md : modes) m = std::max(m, md.nz);
  return m;
}

SpectrumTable enumerate_modes(const TrapModel& trap) {
  trap.validate();
  const double cutoff = trap.energy_cutoff * c::kb * trap.temperature;
  const double ex = c::hbar * trap.omega_x;
  const double ey = c::hbar * trap.omega_y;
  const double ez = c::hbar * trap.omega_z;

  // Simplex volume estimate, just to refuse pathological cutoffs before
  // trying to allocate the mode list.
  double est = (cutoff / ex) * (cutoff / ey) * (cutoff / ez) / 6.0;
  if (est > 5e7)
    throw NumericError("energy cutoff enumerates ~" + std::to_string(est) +
                       " modes; lower energy_cutoff");

  SpectrumTable table;
  table.ground_energy = trap.ground_energy();
  table.cutoff_energy = cutoff;

  const int nx_max = static_cast<int>(std::floor(cutoff / ex));
  for (int nx = 0; nx <= nx_max; ++nx) {
    const double rx = cutoff - ex * nx;
    const int ny_max = static_cast<int>(std::floor(rx / ey));
    for (int ny = 0; ny <= ny_max; ++ny) {
      const double rxy = rx - ey * ny;
      const int nz_max = static_cast<int>(std::floor(rxy / ez));
      for (int nz = 0; nz <= nz_max; ++nz) {
        if (nx == 0 && ny == 0 && nz == 0) continue;
        double energy = table.ground_energy +
                        (ex * nx + ey * ny + ez * nz);
        table.modes.push_back({nx, ny, nz, energy});
      }
    }
  }

  if (table.modes.empty())
    throw StructuralError(
        "no excited mode below the energy cutoff; raise energy_cutoff or "
        "temperature");

  std::sort(table.modes.begin(), table.modes.end(),
            [](const Mode& a, const Mode& b) {
              if (a.energy != b.energy) return a.energy < b.energy;
              return std::tie(a.nx, a.ny, a.nz) < std::tie(b.nx, b.ny, b.nz);
            });
  return table;
}

EnergyClasses group_energies(const SpectrumTable& spectrum, double rel_tol) {
  EnergyClasses out;
  out.mode_class.resize(spectrum.size());
  const double tol = rel_tol * (spectrum.ground_energy + spectrum.cutoff_energy);
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    double e = spectrum.modes[i].energy;
    if (out.energy.empty() || e - out.energy.back() > tol) {
      out.energy.push_back(e);
      out.degeneracy.push_back(0);
    }
    out.mode_class[i] = static_cast<std::uint32_t>(out.energy.size() - 1);
    out.degeneracy.back() += 1;
  }
  return out;
}

void write_spectrum_csv(const std::string& path, const SpectrumTable& spectrum,
                        double temperature) {
  CsvWriter csv(path);
  csv.header({"index", "nx", "ny", "nz", "energy_joule", "excitation_over_kbt"});
  const double kbt = c::kb * temperature;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const Mode& m = spectrum.modes[i];
    csv.row({CsvWriter::cell(static_cast<long long>(i)), CsvWriter::cell(m.nx),
             CsvWriter::cell(m.ny), CsvWriter::cell(m.nz),
             CsvWriter::cell(m.energy),
             CsvWriter::cell((m.energy - spectrum.ground_energy) / kbt)});
  }
}

}  // namespace becsim
