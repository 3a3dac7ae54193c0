#pragma once

#include "chiral/core.hpp"

namespace chiral::reservoir {

// Internal units: hbar = 1, energies in E0, lengths in 1/k0. Kernels never
// see k0 or E0 explicitly; `k0` below is only carried for unit conversion.

/// Microscopic parameters of the spin-orbit-coupled quasicondensate and of
/// its coupling to the lattice atoms. Defaults are the Fig. 2 set.
struct ReservoirParams {
  Real omega0 = 0.2;          // Raman coupling
  Real delta0 = -0.004;       // detuning (< 0)
  Real k0 = 1.0;              // Raman wavevector in inverse micrometres (metadata)
  Real rho_bar = 6.14;        // total density
  Real g_uu = 0.23, g_dd = 0.23, g_ud = 0.23;
  Real g_au = -0.37, g_ad = -0.37;
  Real mass_ratio = 2.0;      // m_a / m_b
  Real length_L = 100.0;
  Real temperature = 0.0;     // k_B T / E0
  Real coarse_length = 1.0;   // grid cell l

  /// G1, G2, G3 interaction energies.
  Real g1() const { return rho_bar / 8.0 * (g_uu + g_dd + 2.0 * g_ud); }
  Real g2() const { return rho_bar / 8.0 * (g_uu + g_dd - 2.0 * g_ud); }
  Real g3() const { return rho_bar / 4.0 * (g_uu - g_dd); }
};

/// Throws InvalidArgument for out-of-domain fields and
/// PhaseConditionViolated when 2 G2 + G3 >= |delta0|.
void validate(const ReservoirParams& p);

struct PlaneWaveSolution {
  Real q = 1.0;        // k_m / k0
  Real k_m = 1.0;
  Real C = 0.0, D = 0.0;
  Real mu = 0.0;
  Real e_gs_per_particle = 0.0;
  Real rho_up = 0.0, rho_down = 0.0;
  Real theta_q = 0.0;  // sin(theta_q) = q
};

/// Positive root of q^4 + 2C q^3 + (C^2 + D^2 - 1) q^2 - 2C q - C^2 = 0 in (0, 1].
Real solve_quartic(Real C, Real D);
Real quartic_residual(Real q, Real C, Real D);

PlaneWaveSolution solve_plane_wave(const ReservoirParams& params);

}  // namespace chiral::reservoir
