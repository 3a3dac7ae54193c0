#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chiral/reservoir/bdg.hpp"

namespace chiral::reservoir {

enum class Side { Left, Right };

const char* to_string(Side s);

struct ChiralChannel {
  Side side = Side::Right;
  Real k_res = 0.0;
  Real v_group = 0.0;
  Real gamma = 0.0;
  Real eta = 0.0;
  Real q_up = 0.0, q_down = 0.0;  // interpolated Q^nu_-(k_res)
};

struct ChannelPair {
  ChiralChannel left;
  ChiralChannel right;
};

/// Lower-branch frequency evaluated exactly (not interpolated) at k.
Real lower_branch_omega(const ReservoirParams& params, const PlaneWaveSolution& pw, Real k);

/// All solutions of omega_-(k) = omega inside the grid, found by bisection
/// within monotone segments of the tabulated branch.
std::vector<Real> lower_branch_crossings(const BdgSpectrum& spectrum, Real omega);

/// The two chiral resonances k_L (v < 0) and k_R (v > 0) at frequency omega.
ChannelPair resonant_channels(const BdgSpectrum& spectrum, Real omega);

Real eta(Real k, Real k_m, Real omega, Real mass_ratio);

/// Fills q, eta and gamma of both channels; returns (gamma_L, gamma_R).
std::pair<Real, Real> decay_rates(ChannelPair& channels, const BdgSpectrum& spectrum, Real omega);

/// Midpoint between the largest interior maximum of the lower branch and the
/// minimum of the upper branch; a frequency inside the chiral window.
Real recentered_omega(const BdgSpectrum& spectrum);

/// Zero of Q^up_-(k) on the lower branch within [k_lo, k_hi], refined by
/// bisection on the exact mode. Empty when Q^up_- keeps its sign.
std::optional<Real> q_up_zero_crossing(const BdgSpectrum& spectrum, Real k_lo, Real k_hi);

struct SweepOptions {
  bool recenter = false;
  Index grid_points = 4096;
  Real k_min = -4.0, k_max = 4.0;
};

struct AsymmetryRow {
  Real omega0 = 0.0;
  Real omega = 0.0;
  Real gamma_l = 0.0, gamma_r = 0.0;
  Real ratio = 0.0;         // gamma_L / gamma_R
  Real polarization = 0.0;  // rho_down / rho_up
  Real q = 0.0;
  Real k_l = 0.0, k_r = 0.0;
  Real v_l = 0.0, v_r = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

/// Rates along a grid of Raman couplings; each row is computed
/// independently and failures are recorded in `error`.
std::vector<AsymmetryRow> asymmetry_sweep(const ReservoirParams& params, Real omega,
                                          const std::vector<Real>& omega0_grid, const SweepOptions& options = {});

}  // namespace chiral::reservoir
