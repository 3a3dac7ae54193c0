#pragma once

#include <cstdint>

#include "chiral/core.hpp"

namespace chiral::linalg {

struct ShiftInvertOptions {
  Complex shift{0.0, 0.0};
  int nev = 6;           // eigenvalues wanted (closest to the shift)
  int block_size = 4;    // detects eigenvalue multiplicities up to this size
  int max_basis = 480;
  int check_interval = 24;
  Real tol = 1e-10;      // relative residual on the inverted operator
  std::uint64_t seed = 0x5eedULL;
};

struct EigenPairs {
  VectorXc values;    // eigenvalues of A, sorted by distance to the shift
  MatrixXc vectors;   // unit-norm right eigenvectors (columns)
  VectorXr residuals; // relative residuals measured on (A - shift)^-1
  int converged = 0;  // leading entries meeting the tolerance
};

/// Block Krylov eigensolver on (A - shift)^-1 with explicit Rayleigh-Ritz
/// projection. The block start makes repeated eigenvalues (e.g. a
/// degenerate steady-state manifold) visible up to `block_size`.
EigenPairs shift_invert_eigs(const SparseMatrixC& a, const ShiftInvertOptions& options);

/// Full spectrum of a dense matrix, sorted by descending real part.
EigenPairs dense_eigs(const MatrixXc& a, bool with_vectors);

}  // namespace chiral::linalg
