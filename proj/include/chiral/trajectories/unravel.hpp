#pragma once

#include <string>
#include <vector>

#include "chiral/chain/params.hpp"

namespace chiral::trajectories {

struct UnravelOptions {
  int check_max_spins = 6;   // generator equivalence is verified up to this size
  Real check_tol = 1e-9;
};

/// Pure-state unraveling of the chain master equation:
///   L(rho) = -i (h_eff rho - rho h_eff^dag) + sum_m c_m rho c_m^dag.
/// Channels: collective right and left chiral jumps, then one local jump per
/// site when gamma' > 0. Channels with zero rate are omitted.
struct UnraveledGenerator {
  chain::ChainParams params;
  int n_spins = 0;
  SparseRowMatrixC h_eff;
  SparseRowMatrixC hamiltonian;  // Hermitian part of h_eff
  std::vector<SparseRowMatrixC> jumps;
  std::vector<std::string> channel_names;
  Real equivalence_residual = -1.0;  // max-norm, or -1 when not checked

  Index hilbert_dim() const { return h_eff.rows(); }
};

UnraveledGenerator unravel(const chain::ChainParams& params, const UnravelOptions& options = {});

/// Lindblad generator rebuilt from (h_eff, jumps) on column-stacked vec(rho).
SparseMatrixC reconstruct_liouvillian(const UnraveledGenerator& gen);

/// max |i (h_eff - h_eff^dag) - sum_m c_m^dag c_m|.
Real dissipator_defect(const UnraveledGenerator& gen);

}  // namespace chiral::trajectories
