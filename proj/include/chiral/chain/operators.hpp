#pragma once

#include <vector>

#include "chiral/core.hpp"

namespace chiral::chain {

// Basis |s_1 ... s_N>, site 1 most significant bit, g -> 0, e -> 1.
// Sites are 0-based in code: site j occupies bit (N - 1 - j).

inline Index hilbert_dim(int n_spins) { return Index{1} << n_spins; }
inline Index site_mask(int n_spins, int site) { return Index{1} << (n_spins - 1 - site); }

/// sigma_j = |g><e| on site j.
SparseRowMatrixC lowering(int n_spins, int site);
/// sigma_j^dag sigma_j.
SparseRowMatrixC excitation(int n_spins, int site);
/// sum_j coeffs_j sigma_j.
SparseRowMatrixC collective_lowering(int n_spins, const VectorXc& coeffs);
/// Pauli x / y on site j (sigma + sigma^dag, i(sigma - sigma^dag) in this convention).
SparseRowMatrixC pauli_x(int n_spins, int site);
SparseRowMatrixC pauli_y(int n_spins, int site);
/// Total excitation number.
SparseRowMatrixC total_excitation(int n_spins);

/// |g...g>.
VectorXc ground_state(int n_spins);

}  // namespace chiral::chain
