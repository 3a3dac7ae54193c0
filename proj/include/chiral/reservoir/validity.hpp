#pragma once

#include <string>
#include <vector>

#include "chiral/reservoir/bdg.hpp"

namespace chiral::reservoir {

/// One "lhs << rhs" inequality; ratio = lhs / rhs.
struct ValidityCheck {
  std::string group;  // expansion, quasi_bec, markov, rwa, temperature, deep_lattice
  std::string name;
  Real lhs = 0.0;
  Real rhs = 0.0;
  Real ratio = 0.0;
  bool ok = false;
};

/// Expansion parameters and inequality margins. The eps fields hold the
/// rotated-basis components: *_up is alpha = +, *_down is alpha = -.
struct ValidityReport {
  Real eps1_up = 0.0, eps1_down = 0.0;
  Real eps2_up = 0.0, eps2_down = 0.0;
  Real eps3 = 0.0;
  Real threshold = 0.1;
  std::vector<ValidityCheck> checks;

  bool markov_ok = true, rwa_ok = true, quasi_bec_ok = true, deep_lattice_ok = true;
  bool expansion_ok = true, temperature_ok = true;

  void add(const std::string& group, const std::string& name, Real lhs, Real rhs);
  /// Recomputes every ok flag from the stored ratios and the threshold.
  void refresh();
  bool evaluated(const std::string& group) const;
  bool group_ok(const std::string& group) const;
  bool all_ok() const;
};

struct EpsilonOptions {
  Index points = 2001;  // odd, so p = 0 is a node (and excluded)
  Real threshold = 0.1;
};

/// RMS expansion parameters from the thermal BdG integrals over
/// p = k - k_m in [-pi/l, pi/l], plus the quasicondensate window checks.
ValidityReport validity_epsilons(const ReservoirParams& params, const PlaneWaveSolution& pw,
                                 const EpsilonOptions& options = {});

/// Healing length 1/sqrt(G1) in units of 1/k0.
Real healing_length(const ReservoirParams& params);

/// Thermal wavelength sqrt(2 pi hbar^2 / (m_b k_B T)); infinite at T = 0.
Real thermal_wavelength(const ReservoirParams& params);

}  // namespace chiral::reservoir
