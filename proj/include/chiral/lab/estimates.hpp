#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chiral/lab/config.hpp"
#include "chiral/reservoir/channels.hpp"
#include "chiral/reservoir/physical.hpp"
#include "chiral/reservoir/validity.hpp"

namespace chiral::lab {

struct SetupOptions {
  Real threshold = 0.1;
  Real rate_scale = 1.0;  // multiplies the reservoir decay rates before checking
  reservoir::SweepOptions grid;
};

/// Validity audit of one experimental setup.
struct SetupReport {
  reservoir::ValidityReport report;  // every inequality with its margin
  reservoir::ChannelPair channels;
  Real gamma_l = 0.0, gamma_r = 0.0;  // E0/hbar, after rate_scale
  int n_spins = 0;
  /// Verdict on the master-equation approximations: markov, rwa,
  /// temperature and (when a lattice is given) deep_lattice. The expansion
  /// and quasi_bec groups are reported but do not enter the verdict.
  bool approximations_ok = false;
  std::vector<std::string> notes;
};

/// Evaluates
///   markov:       gamma_s << 2 pi |v_s| / (N d)          (needs a lattice)
///   rwa:          gamma_L, gamma_R << Omega_0, omega
///   temperature:  k_B T << hbar omega
///   deep_lattice: (2 E0/hbar omega)^2 (m_b/m_a)^2 (k_lat/k0)^4 << 1 and
///                 hbar^2 k_lat^2 / 2 m_a << V0 (when V0 is given)
/// plus the reservoir expansion and quasicondensate checks.
SetupReport validate_setup(const reservoir::ReservoirParams& params, Real omega, int n_spins,
                           const std::optional<LatticeSection>& lattice, const SetupOptions& options = {});

/// Physical inputs of the Rb/Yb estimate.
struct RbYbPreset {
  Real e0_hz = 3500.0;
  Real mass_b_amu = 86.909180527;   // 87Rb
  Real mass_a_amu = 171.936386;     // 172Yb
  Real mass_ratio = 172.0 / 87.0;
  Real rho_bar_per_um = 48.0;
  Real omega_perp_hz = 10e3;
  Real a_scatter_bohr = -160.7;
  Real omega_hz = 5.3e3;            // hbar omega / h
  Real temperature_nk = 5.0;
  Real delta0 = -0.004;             // E0
  Real g_intra = 0.23;              // E0/k0, Rb-Rb couplings
  Real omega0_rates = 0.2;          // Raman coupling of the rate estimate (E0)
  Real omega0_max = 2.0;            // largest Raman coupling used (E0)
  Real sweep_from = 0.01, sweep_to = 2.0;
  int sweep_steps = 100;
  Real scattering_ratio = 1e-5;     // 12 Gamma / Delta_FS
  Real d_line_width_hz = 6.0666e6;  // Gamma / 2 pi
  Real fine_structure_hz = 7.1229e12;
  Real two_delta0_quoted_hz = 25.0;
  int n_spins = 30;
  Real d_nm = 800.0;
  Real tss_gamma = 300.0;           // t_ss gamma_R of a 30-spin chain
};

struct EstimatesReport {
  RbYbPreset input;
  UnitSystem units;
  reservoir::ReservoirParams params;
  Real omega = 0.0;
  reservoir::Coupling1d coupling;
  Real g_a = 0.0;  // E0/k0
  Real gamma_l = 0.0, gamma_r = 0.0;          // E0/hbar at omega0_rates
  Real gamma_l_hz = 0.0, gamma_r_hz = 0.0;    // gamma / 2 pi
  Real ratio_min = 0.0, ratio_max = 0.0;      // gamma_L/gamma_R across the sweep
  Real gamma_r_hz_min = 0.0, gamma_r_hz_max = 0.0;
  int sweep_failures = 0;
  reservoir::PhotonScattering photon;         // rad/s and s at omega0_max
  Real tau_d_line_s = 0.0;                    // with the tabulated D-line constants
  Real t_ss_s = 0.0;
  Real two_delta0_hz = 0.0;
  SetupReport validity;
  std::vector<std::string> notes;
};

EstimatesReport estimates(const RbYbPreset& preset = {}, Real threshold = 0.1);

}  // namespace chiral::lab
