#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "chiral/chain/evolve.hpp"
#include "chiral/chain/liouvillian.hpp"
#include "chiral/chain/observables.hpp"
#include "chiral/chain/operators.hpp"
#include "chiral/trajectories/trajectory.hpp"

using namespace chiral;
using namespace chiral::trajectories;
using chain::ChainParams;

namespace {

ChainParams random_params(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<Real> u(0.0, 1.0);
  ChainParams p;
  p.n_spins = n;
  p.rabi = Complex(u(rng) - 0.5, u(rng) - 0.5);
  p.detuning = u(rng) - 0.5;
  p.gamma_l = 1.5 * u(rng);
  p.gamma_r = 1.5 * u(rng);
  p.epsilon_comm = 3.0 * u(rng);
  p.gamma_prime = u(rng) < 0.5 ? 0.0 : 0.4 * u(rng);
  if (u(rng) < 0.3) {
    p.site_phases.resize(n);
    for (auto& v : p.site_phases) v = 6.0 * u(rng);
  }
  return p;
}

ChainParams dimer_params(int n, Real gl) {
  ChainParams p;
  p.n_spins = n;
  p.rabi = 0.5;
  p.gamma_l = gl;
  p.gamma_r = 1.0;
  return p;
}

}  // namespace

TEST_CASE("reconstructed generator equals the master equation") {
  std::mt19937_64 rng(2024);
  UnravelOptions o;
  o.check_max_spins = 0;  // compare here instead of inside unravel
  for (int n = 2; n <= 6; ++n) {
    for (int draw = 0; draw < 50; ++draw) {
      const auto p = random_params(rng, n);
      const auto gen = unravel(p, o);
      const SparseMatrixC diff = reconstruct_liouvillian(gen) - chain::build_liouvillian(p).to_sparse();
      Real worst = 0.0;
      for (Index k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
      CHECK(worst < 1e-9);
      CHECK(dissipator_defect(gen) < 1e-10);
    }
  }
}

TEST_CASE("channel structure") {
  auto p = dimer_params(4, 0.0);
  auto gen = unravel(p);
  CHECK(gen.jumps.size() == 1);
  CHECK(gen.equivalence_residual >= 0.0);
  CHECK(gen.equivalence_residual < 1e-9);
  // the right-moving channel annihilates the dimer product
  const VectorXc d = chain::dimer_product(p).state;
  CHECK((gen.jumps[0] * d).norm() < 1e-13);

  p.gamma_l = 0.3;
  p.gamma_prime = 0.1;
  gen = unravel(p);
  CHECK(gen.jumps.size() == 2 + 4);
  for (int j = 0; j < 4; ++j) {
    const MatrixXc expected = std::sqrt(0.1) * MatrixXc(chain::lowering(4, j));
    CHECK((MatrixXc(gen.jumps[2 + j]) - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("no jump channels: unitary evolution keeps the norm") {
  ChainParams p;
  p.n_spins = 3;
  p.rabi = Complex(0.4, 0.1);
  p.detuning = 0.2;
  p.gamma_l = 0.0;
  p.gamma_r = 0.0;
  const auto gen = unravel(p);
  CHECK(gen.jumps.empty());
  TrajectoryConfig cfg;
  cfg.t_final = 20.0;
  cfg.observables.push_back({"norm", [](const VectorXc& psi) { return psi.norm(); }});
  const auto path = run_trajectory(gen, chain::ground_state(3), cfg, 0);
  CHECK(path.jumps.empty());
  CHECK(std::abs(path.final_state.norm() - 1.0) < 1e-12);
  // matches the exact propagator
  const MatrixXc u = (MatrixXc(-kI * MatrixXc(gen.h_eff) * 20.0)).exp();
  const VectorXc ref = u * chain::ground_state(3);
  CHECK(std::abs(std::abs(ref.dot(path.final_state)) - 1.0) < 1e-7);
}

TEST_CASE("dark state: no jumps and stationary up to a phase") {
  for (int n : {2, 4, 6}) {
    const auto p = dimer_params(n, 0.0);
    const auto gen = unravel(p);
    const VectorXc d = chain::dimer_product(p).state;
    TrajectoryConfig cfg;
    cfg.t_final = 100.0;
    cfg.n_traj = 8;
    cfg.seed = 99;
    for (int k = 0; k < cfg.n_traj; ++k) {
      const auto path = run_trajectory(gen, d, cfg, static_cast<std::uint64_t>(k));
      CHECK(path.jumps.empty());
      CHECK(std::abs(d.dot(path.final_state)) > 1.0 - 1e-9);
    }
  }
}

TEST_CASE("single trajectory ensemble equals run_trajectory") {
  const auto p = dimer_params(4, 0.2);
  const auto gen = unravel(p);
  TrajectoryConfig cfg;
  cfg.seed = 5;
  cfg.t_final = 15.0;
  cfg.observables = site_populations(4);
  const auto path = run_trajectory(gen, chain::ground_state(4), cfg, 0);
  const auto ens = ensemble_average(gen, chain::ground_state(4), cfg);
  CHECK(ens.n_traj == 1);
  CHECK((ens.mean - path.observables).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ens.total_jumps == static_cast<long>(path.jumps.size()));
}

TEST_CASE("reproducible for a fixed seed, different across seeds") {
  const auto p = dimer_params(4, 0.4);
  const auto gen = unravel(p);
  TrajectoryConfig cfg;
  cfg.seed = 42;
  cfg.n_traj = 16;
  cfg.t_final = 10.0;
  cfg.observables = site_populations(4);
  cfg.pair_marginals = true;
  cfg.global_purity = true;
  const auto a = ensemble_average(gen, chain::ground_state(4), cfg);
  const auto b = ensemble_average(gen, chain::ground_state(4), cfg);
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.stderr_ - b.stderr_).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.purity - b.purity).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.total_jumps == b.total_jumps);
  cfg.seed = 43;
  const auto c = ensemble_average(gen, chain::ground_state(4), cfg);
  CHECK((a.mean - c.mean).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("single-spin waiting times have the decay-rate mean") {
  // single decaying spin: waiting time is exponential with rate gamma_l + gamma_r
  ChainParams p;
  p.n_spins = 1;
  p.rabi = 0.0;
  p.gamma_l = 0.0;
  p.gamma_r = 1.0;
  const auto gen = unravel(p);
  VectorXc e(2);
  e << 0.0, 1.0;
  TrajectoryConfig cfg;
  cfg.t_final = 60.0;
  cfg.seed = 7;
  Real sum = 0.0;
  const int m = 2000;
  for (int k = 0; k < m; ++k) {
    const auto path = run_trajectory(gen, e, cfg, static_cast<std::uint64_t>(k));
    REQUIRE(path.jumps.size() == 1);
    sum += path.jumps[0].t;
  }
  // mean waiting time 1, standard error 1/sqrt(m)
  CHECK(std::abs(sum / m - 1.0) < 4.0 / std::sqrt(static_cast<Real>(m)));
}

TEST_CASE("standard errors shrink by about sqrt(2) when n_traj doubles") {
  const auto p = dimer_params(2, 0.3);
  const auto gen = unravel(p);
  TrajectoryConfig cfg;
  cfg.seed = 11;
  cfg.t_final = 8.0;
  cfg.t_grid = {2.0, 4.0, 6.0, 8.0};
  cfg.observables = site_populations(2);
  cfg.n_traj = 400;
  const auto a = ensemble_average(gen, chain::ground_state(2), cfg);
  cfg.n_traj = 800;
  const auto b = ensemble_average(gen, chain::ground_state(2), cfg);
  const Real ratio = a.stderr_.sum() / b.stderr_.sum();
  CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("ensemble means agree with the density-matrix evolution") {
  auto p = dimer_params(4, 0.3);
  p.epsilon_comm = 0.2;
  const auto gen = unravel(p);
  TrajectoryConfig cfg;
  cfg.seed = 123;
  cfg.n_traj = 400;
  cfg.t_final = 20.0;
  cfg.t_grid.clear();
  for (int k = 1; k <= 10; ++k) cfg.t_grid.push_back(2.0 * k);
  cfg.observables = site_populations(4);
  const VectorXc psi0 = chain::ground_state(4);
  const auto ens = ensemble_average(gen, psi0, cfg);

  std::vector<Real> times = {0.0};
  times.insert(times.end(), cfg.t_grid.begin(), cfg.t_grid.end());
  const auto rhos = chain::evolve(chain::build_liouvillian(p), chain::pure_density(psi0), times);
  Real chi2 = 0.0;
  int dof = 0;
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
    for (int j = 0; j < 4; ++j) {
      const Real exact = chain::reduced_site(rhos[i + 1], j)(1, 1).real();
      const Real z = (ens.mean(static_cast<Index>(i), j) - exact) / ens.stderr_(static_cast<Index>(i), j);
      CHECK(std::abs(z) < 4.0);
      chi2 += z * z;
      ++dof;
    }
  CHECK(chi2 / dof < 2.0);
}

TEST_CASE("pair marginals cover every adjacent pair") {
  const auto p = dimer_params(4, 0.0);
  const auto gen = unravel(p);
  TrajectoryConfig cfg;
  cfg.t_final = 1.0;
  cfg.t_grid = {0.0, 1.0};
  cfg.pair_marginals = true;
  const auto ens = ensemble_average(gen, chain::dimer_product(p).state, cfg);
  REQUIRE(ens.pairs.size() == 2);
  CHECK(ens.pairs[0].size() == 3);
  const MatrixXr s = ens.pair_entropies();
  CHECK(s(1, 0) < 1e-9);
  CHECK(s(1, 2) < 1e-9);
  CHECK(s(1, 1) > 0.1);
}

TEST_CASE("invalid inputs") {
  const auto gen = unravel(dimer_params(2, 0.0));
  TrajectoryConfig cfg;
  VectorXc bad = VectorXc::Zero(4);
  bad(0) = 2.0;
  CHECK_THROWS_AS(run_trajectory(gen, bad, cfg, 0), Error);
  cfg.n_traj = 0;
  CHECK_THROWS_AS(ensemble_average(gen, chain::ground_state(2), cfg), Error);
}
