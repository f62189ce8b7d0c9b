#pragma once

namespace qtm4f {

// Energies are stored as E/k_B in kelvin, fields in tesla, moments in Bohr
// magnetons, times in nanoseconds. These are the only conversion factors.
struct PhysicalConstants {
  // mu_B / k_B: a 1 mu_B moment in 1 T has a Zeeman energy of 0.671714 K.
  static constexpr double mu_B_over_k_B = 0.671714;  // K/T
  // k_B / h: an energy of 1 K corresponds to 20.836619 GHz.
  static constexpr double k_B_over_h = 20.836619;  // GHz/K
};

}  // namespace qtm4f
