#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "chiral/trajectories/unravel.hpp"

namespace chiral::trajectories {

/// Scalar observable evaluated on a normalized state vector.
struct Observable {
  std::string name;
  std::function<Real(const VectorXc& psi)> fn;
};

/// <psi| op |psi> for a Hermitian operator.
Observable expectation(std::string name, SparseRowMatrixC op);

/// Excitation of every site, n_1 ... n_N.
std::vector<Observable> site_populations(int n_spins);

/// Population of the dimer state |D> on each pair (1,2), (3,4), ...
std::vector<Observable> dimer_populations(int n_spins, Complex alpha);

struct TrajectoryConfig {
  std::uint64_t seed = 1;
  int n_traj = 1;
  Real dt_max = std::numeric_limits<Real>::infinity();
  Real t_final = 10.0;
  std::vector<Real> t_grid;  // empty: 101 uniform points on [0, t_final]
  std::vector<Observable> observables;
  bool pair_marginals = false;  // average the reduced states of sites (j, j+1), j = 0 .. N-2
  bool global_purity = false;   // Tr rho^2 of the ensemble state (keeps states at output times)
  Real rtol = 1e-8;
  Real atol = 1e-10;
  Real jump_time_tol = 1e-10;

  /// The output grid actually used.
  std::vector<Real> times() const;
};

struct JumpRecord {
  Real t = 0.0;
  int channel = 0;
};

struct TrajectoryPath {
  std::uint64_t stream_index = 0;
  std::vector<Real> t;
  MatrixXr observables;                    // times x observables
  std::vector<std::vector<MatrixXc>> pairs;  // [time][pair] 4x4 reduced states (if requested)
  std::vector<JumpRecord> jumps;
  std::vector<VectorXc> states;  // normalized states at output times (if requested)
  VectorXc final_state;
  long steps = 0;
};

/// Monte Carlo wave-function run. The no-jump evolution d psi/dt = -i h_eff psi
/// is integrated with an adaptive Runge-Kutta scheme; a jump fires when the
/// squared norm falls to a uniform draw, with the time located by bisection.
TrajectoryPath run_trajectory(const UnraveledGenerator& gen, const VectorXc& psi0, const TrajectoryConfig& config,
                              std::uint64_t stream_index);

struct TrajectoryEnsemble {
  int n_traj = 0;
  std::vector<Real> t;
  std::vector<std::string> names;
  MatrixXr mean;    // times x observables
  MatrixXr stderr_;  // standard error of the mean
  std::vector<std::vector<MatrixXc>> pairs;  // averaged pair states [time][pair]
  std::vector<std::string> channel_names;
  VectorXr purity;          // Tr rho^2 per output time (if requested)
  MatrixXi jump_histogram;  // channels x output intervals
  long total_jumps = 0;

  /// Von Neumann entropies and purities of the averaged pair states.
  MatrixXr pair_entropies() const;
  MatrixXr pair_purities() const;
};

/// Runs n_traj trajectories with stream indices 0 .. n_traj-1 in parallel and
/// reduces in index order.
TrajectoryEnsemble ensemble_average(const UnraveledGenerator& gen, const VectorXc& psi0,
                                    const TrajectoryConfig& config);

}  // namespace chiral::trajectories
