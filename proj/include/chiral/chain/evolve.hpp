#pragma once

#include <functional>
#include <vector>

#include "chiral/chain/liouvillian.hpp"

namespace chiral::chain {

using DensityMatrix = RowMatrixXc;

struct DensityChecks {
  Real hermitian_tol = 1e-12;
  Real trace_tol = 1e-10;
  Real psd_floor = -1e-8;
  Index psd_max_dim = 512;  // eigen-decomposition above this size is skipped
};

/// Throws InvalidState when rho violates the density-matrix invariants.
void check_density_matrix(const DensityMatrix& rho, const DensityChecks& checks = {});

DensityMatrix pure_density(const VectorXc& psi);

struct EvolveOptions {
  Real rtol = 1e-8;
  Real atol = 1e-10;
  bool validate = true;
  DensityChecks checks;
};

using EvolveObserver = std::function<void(Real t, const DensityMatrix& rho)>;

/// Integrates d rho/dt = L(rho) and reports the state at every time in
/// `t_grid` (increasing, starting at or after 0). Steps are clipped to land
/// exactly on output times. Returns integrator step statistics.
struct EvolveStats {
  long steps = 0;
  long rejected = 0;
};

EvolveStats evolve(const Superoperator& l, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                   const EvolveObserver& observer, const EvolveOptions& options = {});

std::vector<DensityMatrix> evolve(const Superoperator& l, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                                  const EvolveOptions& options = {});

}  // namespace chiral::chain
