#pragma once

#include <string>

#include "chiral/chain/evolve.hpp"

namespace chiral::chain {

struct SpectralOptions {
  Real null_threshold = 1e-9;  // |lambda| below threshold * rate_scale counts as stationary
  int dense_max_spins = 5;
  int krylov_max_spins = 8;
  int krylov_nev = 16;
  int krylov_block = 4;
  Real krylov_shift = 1e-3;    // positive real shift, in units of rate_scale
  Real krylov_tol = 1e-10;
  // evolution fallback for larger chains
  Real relax_tol = 1e-10;      // stop once max |L(rho)| < relax_tol * rate_scale
  Real relax_t_max = 1e5;
  Real relax_interval = 10.0;
};

struct SteadyState {
  DensityMatrix rho;
  int nullspace_dim = 0;
  std::string method;     // "dense", "krylov" or "evolution"
  Real residual = 0.0;    // max |L(rho)|
};

SteadyState steady_state(const Superoperator& l, const SpectralOptions& options = {});

struct LiouvillianGap {
  Complex lambda1{0.0, 0.0};
  Real t_ss = 0.0;
  int nullspace_dim = 0;
  bool degenerate = false;  // gap taken relative to a nullspace of dimension > 1
  std::string method;
};

LiouvillianGap liouvillian_gap(const Superoperator& l, const SpectralOptions& options = {});

/// Eigenvalues near zero (dense: the whole spectrum), sorted by descending real part.
VectorXc slow_eigenvalues(const Superoperator& l, const SpectralOptions& options = {});

}  // namespace chiral::chain
