#pragma once

#include <vector>

#include "chiral/chain/evolve.hpp"
#include "chiral/chain/params.hpp"

namespace chiral::chain {

/// Product of pair states |D> = (|gg> + alpha |S>) / sqrt(1 + |alpha|^2) on
/// pairs (1,2), (3,4), ..., with |S> = (|ge> - |eg>)/sqrt(2).
struct DimerProduct {
  int n_pairs = 0;
  Complex alpha{0.0, 0.0};
  VectorXc pair_state;  // 4 amplitudes in the |s_a s_b> basis
  VectorXc state;       // full 2^N state
};

/// alpha = 2 i sqrt(2) conj(Omega) / (gamma_r - gamma_l). For gamma_l >
/// gamma_r the signed asymmetry gives the mirrored (left-cascaded) dimer.
DimerProduct dimer_product(const ChainParams& params);
DimerProduct dimer_product(int n_spins, Complex alpha);

/// Reduced state of sites j, l (0-based, j != l) in the |s_j s_l> basis.
MatrixXc reduced_pair(const DensityMatrix& rho, int j, int l);
MatrixXc reduced_site(const DensityMatrix& rho, int j);

inline constexpr Real kEntropyFloor = 1e-14;

/// Von Neumann entropy (natural log) with eigenvalues below the floor dropped.
Real entropy(const MatrixXc& rho);
inline Real pair_entropy(const MatrixXc& rho_pair) { return entropy(rho_pair); }
Real purity(const MatrixXc& rho);
Real purity(const DensityMatrix& rho);
/// <psi| rho |psi>.
Real fidelity(const DensityMatrix& rho, const VectorXc& psi);

struct PairObservables {
  std::vector<MatrixXc> pairs;   // rho_{2j-1,2j}
  std::vector<Real> entropies;   // S_{2j-1,2j}
  std::vector<Real> purities;    // P_{2j-1,2j}
  Real purity = 0.0;             // Tr rho^2
};

/// Observables of the adjacent pairs (1,2), (3,4), ... .
PairObservables pair_observables(const DensityMatrix& rho);

}  // namespace chiral::chain
