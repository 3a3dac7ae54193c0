#pragma once

#include <string>

#include "chiral/core.hpp"

namespace chiral::lab {

enum class Dimension {
  None,        // plain number
  Energy,      // E0 (frequencies and temperatures convert here too)
  Wavevector,  // k0 (also densities)
  Length,      // 1/k0
  Coupling,    // E0 / k0
};

/// Physical scale of the dimensionless units: E0 = h * e0_hz and
/// k0 = sqrt(2 m_b E0) / hbar.
struct UnitSystem {
  Real e0_hz = 3500.0;
  Real mass_b_amu = 86.909180527;

  Real e0_joule() const;
  Real k0_per_m() const;
  Real k0_per_um() const { return k0_per_m() * 1e-6; }
  /// E0/hbar in 1/s: converts dimensionless rates to angular frequencies.
  Real rate_per_s() const;
};

/// Parses "<number> [unit]" into internal units. A bare number is taken as
/// already dimensionless. Accepted units by dimension:
///   Energy: E0, Hz, kHz, MHz (as h*f), nK, uK, mK, K (as k_B*T)
///   Wavevector: k0, 1/um, um^-1, 1/m, m^-1
///   Length: 1/k0, nm, um, mm, m
///   Coupling: E0/k0, J*m
/// Throws ConfigError naming `key` on malformed input or a unit that does not
/// match the dimension.
Real parse_quantity(const std::string& key, const std::string& text, Dimension dim, const UnitSystem& units);

}  // namespace chiral::lab
