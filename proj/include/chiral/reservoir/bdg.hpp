#pragma once

#include <utility>
#include <vector>

#include "chiral/reservoir/plane_wave.hpp"

namespace chiral::reservoir {

enum class Branch { Lower, Upper };  // "-" and "+"

const char* to_string(Branch b);

/// One Bogoliubov excitation. Amplitudes live in the rotated spin basis
/// (alpha = +, -); q_up and q_down are the lab-basis coefficients Q^nu.
struct BdgMode {
  Real k = 0.0;
  Branch branch = Branch::Lower;
  Real omega = 0.0;
  Real u_plus = 0.0, u_minus = 0.0, v_plus = 0.0, v_minus = 0.0;
  Real q_up = 0.0, q_down = 0.0;
  bool zero_mode = false;  // the Goldstone point k = k_m; amplitudes are zero

  Real symplectic_norm() const {
    return u_plus * u_plus + u_minus * u_minus - v_plus * v_plus - v_minus * v_minus;
  }
};

struct BdgSpectrum {
  ReservoirParams params;
  PlaneWaveSolution pw;
  std::vector<Real> k;
  std::vector<BdgMode> lower;
  std::vector<BdgMode> upper;

  Real spacing() const { return k.size() > 1 ? (k.back() - k.front()) / static_cast<Real>(k.size() - 1) : 0.0; }
};

/// Uniform grid with `n` points on [k_min, k_max].
std::vector<Real> default_k_grid(Index n = 4096, Real k_min = -4.0, Real k_max = 4.0);

/// Symmetric BdG matrix H(p) at p = k - k_m in the rotated basis, ordered
/// (u+, u-, v+, v-). The dynamical matrix is sigma_z H.
Eigen::Matrix4d bdg_hamiltonian(const ReservoirParams& params, const PlaneWaveSolution& pw, Real p);

/// Both branches at one wavevector, (lower, upper).
std::pair<BdgMode, BdgMode> bdg_pair(const ReservoirParams& params, const PlaneWaveSolution& pw, Real k);

/// Modes on an increasing grid. The sign of each mode is fixed by making the
/// largest |u| positive and then kept continuous along the grid.
BdgSpectrum bdg_modes(const ReservoirParams& params, const PlaneWaveSolution& pw, const std::vector<Real>& k_grid);

}  // namespace chiral::reservoir
