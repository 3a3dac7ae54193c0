#pragma once

#include <vector>

#include "chiral/core.hpp"

namespace chiral::chain {

/// Spin-chain master-equation parameters. Rates and frequencies are in
/// units of gamma_r unless a caller chooses otherwise.
struct ChainParams {
  int n_spins = 2;
  Complex rabi{0.5, 0.0};
  Real detuning = 0.0;      // delta = nu - omega
  Real gamma_l = 0.0;
  Real gamma_r = 1.0;
  Real epsilon_comm = 0.0;  // phi_jl = (j - l) * epsilon / 2
  Real gamma_prime = 0.0;   // on-site loss outside the 1D bath
  std::vector<Real> site_phases;  // optional drive phase per site (empty = all zero)

  Real delta_gamma() const { return gamma_r - gamma_l; }
  /// Per-site complex drive Omega_j = rabi * exp(i phase_j).
  Complex site_rabi(int j) const;
};

void validate(const ChainParams& p);

/// Coefficients of the generator written as
///   L(rho) = K rho + rho K^dag + sum_jl c_jl sigma_j rho sigma_l^dag,
///   K = -i H_sys + sum_ab m_ab sigma_a^dag sigma_b,
/// indexed by physical site. Inputs with gamma_l > gamma_r are built on the
/// mirrored chain (sites reversed, rates swapped) and flagged.
struct ChainCoefficients {
  int n_spins = 0;
  MatrixXc m;       // N x N
  MatrixXc c;       // N x N, Hermitian positive semidefinite
  VectorXc drive;   // Omega_j
  Real detuning = 0.0;
  bool mirrored = false;
};

ChainCoefficients chain_coefficients(const ChainParams& p);

/// The orientation actually built: rates with gamma_r >= gamma_l and the
/// physical site carried by each built site.
struct Orientation {
  ChainParams built;
  std::vector<int> physical_site;
  bool mirrored = false;
};

Orientation orient(const ChainParams& p);

}  // namespace chiral::chain
