#pragma once

#include <numbers>
#include <string>

#include "chiral/core.hpp"

namespace chiral::reservoir {

/// CODATA constants in SI units.
namespace si {
inline constexpr Real h = 6.62607015e-34;
inline constexpr Real hbar = h / (2.0 * std::numbers::pi);
inline constexpr Real k_b = 1.380649e-23;
inline constexpr Real amu = 1.66053906660e-27;
inline constexpr Real a_bohr = 5.29177210903e-11;
}  // namespace si

struct Coupling1d {
  Real g = 0.0;               // 2 hbar omega_perp a_s, in J m
  Real l_perp = 0.0;          // transverse oscillator length sqrt(hbar / (m omega_perp))
  Real ratio = 0.0;           // |a_s| / l_perp
  bool confinement_warning = false;  // ratio > 0.1
  std::string warning;
};

/// Lowest-order 1D coupling from a 3D scattering length (SI inputs:
/// a_s in m, omega_perp in rad/s, mass in kg).
Coupling1d g1d_from_scattering(Real a_s, Real omega_perp, Real mass);

struct PhotonScattering {
  Real gamma_sc = 0.0;  // same units as omega0
  Real tau = 0.0;       // 2 pi / gamma_sc
};

/// Gamma_sc = 12 (gamma_line / splitting) omega0.
PhotonScattering photon_scattering_lifetime(Real omega0, Real gamma_line, Real fine_structure_splitting);

/// Same with the ratio gamma_line / splitting given directly.
PhotonScattering photon_scattering_lifetime(Real omega0, Real line_to_splitting);

}  // namespace chiral::reservoir
