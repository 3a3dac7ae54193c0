#include "chiral/trajectories/trajectory.hpp"

#include <cmath>
#include <random>

#include "chiral/chain/observables.hpp"
#include "chiral/chain/operators.hpp"
#include "chiral/linalg/dopri5.hpp"
#include "chiral/parallel.hpp"

namespace chiral::trajectories {

Observable expectation(std::string name, SparseRowMatrixC op) {
  return {std::move(name), [op = std::move(op)](const VectorXc& psi) { return psi.dot(op * psi).real(); }};
}

std::vector<Observable> site_populations(int n) {
  std::vector<Observable> out;
  for (int j = 0; j < n; ++j) out.push_back(expectation("n_" + std::to_string(j + 1), chain::excitation(n, j)));
  return out;
}

std::vector<Observable> dimer_populations(int n, Complex alpha) {
  const VectorXc d = chain::dimer_product(2, alpha).pair_state;
  std::vector<Observable> out;
  for (int j = 0; j + 1 < n; j += 2) {
    const Index dim = chain::hilbert_dim(n);
    const Index mj = chain::site_mask(n, j), ml = chain::site_mask(n, j + 1);
    out.push_back({"D_" + std::to_string(j + 1) + "_" + std::to_string(j + 2), [=](const VectorXc& psi) {
                     // sum over the rest of |<D| psi_rest>|^2
                     Real acc = 0.0;
                     for (Index s = 0; s < dim; ++s) {
                       if (s & (mj | ml)) continue;
                       const Complex a = std::conj(d(0)) * psi(s) + std::conj(d(1)) * psi(s | ml) +
                                         std::conj(d(2)) * psi(s | mj) + std::conj(d(3)) * psi(s | mj | ml);
                       acc += std::norm(a);
                     }
                     return acc;
                   }});
  }
  return out;
}

std::vector<Real> TrajectoryConfig::times() const {
  if (!t_grid.empty()) return t_grid;
  std::vector<Real> t(101);
  for (int i = 0; i <= 100; ++i) t[i] = t_final * i / 100.0;
  return t;
}

namespace {

void validate_config(const TrajectoryConfig& c, const std::vector<Real>& times) {
  if (c.n_traj < 1) throw Error(ErrorCode::InvalidArgument, "n_traj must be >= 1");
  if (!(c.dt_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt_max must be positive");
  if (times.empty() || times.front() < 0.0) throw Error(ErrorCode::InvalidArgument, "time grid must start at t >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw Error(ErrorCode::InvalidArgument, "time grid must increase strictly");
}

std::vector<MatrixXc> pair_states(const VectorXc& psi, int n) {
  std::vector<MatrixXc> out;
  const Index dim = psi.size();
  for (int j = 0; j + 1 < n; ++j) {
    const Index mj = chain::site_mask(n, j), ml = chain::site_mask(n, j + 1);
    MatrixXc r = MatrixXc::Zero(4, 4);
    for (Index s = 0; s < dim; ++s) {
      if (s & (mj | ml)) continue;
      const Complex a[4] = {psi(s), psi(s | ml), psi(s | mj), psi(s | mj | ml)};
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) r(x, y) += a[x] * std::conj(a[y]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Per-trajectory random stream keyed by (seed, stream index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x636869u};
  return std::mt19937_64(seq);
}

Real uniform(std::mt19937_64& rng) {
  // (0, 1], so a jump threshold is never exactly zero
  return (static_cast<Real>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

constexpr Real kNormFloor = 1e-300;

}  // namespace

TrajectoryPath run_trajectory(const UnraveledGenerator& gen, const VectorXc& psi0, const TrajectoryConfig& config,
                              std::uint64_t stream_index) {
  const auto times = config.times();
  validate_config(config, times);
  if (psi0.size() != gen.hilbert_dim()) throw Error(ErrorCode::InvalidArgument, "psi0 has the wrong dimension");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10) throw Error(ErrorCode::InvalidState, "psi0 must be normalized");

  const SparseRowMatrixC& h = gen.h_eff;
  auto rhs = [&h](Real, const VectorXc& y, VectorXc& dy) { dy.noalias() = h * y; dy *= Complex(0.0, -1.0); };
  linalg::Dopri5Options dopt;
  dopt.rtol = config.rtol;
  dopt.atol = config.atol;
  dopt.h_max = config.dt_max;
  auto solver = linalg::make_dopri5<VectorXc>(rhs, dopt);

  std::mt19937_64 rng = make_stream(config.seed, stream_index);
  TrajectoryPath path;
  path.stream_index = stream_index;
  path.t = times;
  path.observables.resize(static_cast<Index>(times.size()), static_cast<Index>(config.observables.size()));

  auto record = [&](std::size_t i, const VectorXc& psi) {
    const VectorXc unit = psi / psi.norm();
    for (std::size_t o = 0; o < config.observables.size(); ++o)
      path.observables(static_cast<Index>(i), static_cast<Index>(o)) = config.observables[o].fn(unit);
    if (config.pair_marginals) path.pairs.push_back(pair_states(unit, gen.n_spins));
    if (config.global_purity) path.states.push_back(unit);
  };

  VectorXc psi = psi0;
  Real t = 0.0;
  Real threshold = uniform(rng);
  std::size_t out = 0;
  while (out < times.size() && times[out] <= 0.0) record(out++, psi);

  const Index n_ch = static_cast<Index>(gen.jumps.size());
  VectorXc start, trial;
  while (out < times.size()) {
    const Real t0 = t;
    start = psi;
    solver.step(t, psi, times[out]);
    const Real norm2 = psi.squaredNorm();
    if (!(norm2 >= kNormFloor))
      throw Error(ErrorCode::NormUnderflow, "no-jump norm underflow at t=" + std::to_string(t));

    if (norm2 <= threshold && n_ch > 0) {
      // Locate the crossing inside [t0, t] by bisection on the squared norm.
      Real lo = 0.0, hi = t - t0;
      trial = psi;
      while (hi - lo > config.jump_time_tol) {
        const Real mid = 0.5 * (lo + hi);
        solver.single_step(t0, start, mid, trial);
        if (trial.squaredNorm() > threshold) lo = mid;
        else hi = mid;
      }
      solver.single_step(t0, start, hi, psi);
      t = t0 + hi;

      VectorXr weight(n_ch);
      std::vector<VectorXc> images(static_cast<std::size_t>(n_ch));
      for (Index m = 0; m < n_ch; ++m) {
        images[m] = gen.jumps[m] * psi;
        weight(m) = images[m].squaredNorm();
      }
      const Real total = weight.sum();
      if (!(total > 0.0)) throw Error(ErrorCode::NormUnderflow, "jump fired with vanishing jump rates");
      Real pick = uniform(rng) * total, cum = 0.0;
      Index chosen = n_ch - 1;
      for (Index m = 0; m < n_ch; ++m) {
        cum += weight(m);
        if (pick <= cum) {
          chosen = m;
          break;
        }
      }
      psi = images[chosen] / std::sqrt(weight(chosen));
      path.jumps.push_back({t, static_cast<int>(chosen)});
      threshold = uniform(rng);
      solver.reset();
    }
    while (out < times.size() && t >= times[out]) record(out++, psi);
  }
  path.final_state = psi / psi.norm();
  path.steps = solver.steps();
  return path;
}

TrajectoryEnsemble ensemble_average(const UnraveledGenerator& gen, const VectorXc& psi0,
                                    const TrajectoryConfig& config) {
  const auto times = config.times();
  validate_config(config, times);
  const int n = config.n_traj;
  std::vector<TrajectoryPath> paths(static_cast<std::size_t>(n));
  std::vector<std::string> failures(static_cast<std::size_t>(n));
  parallel_for(n, [&](Index i) {
    try {
      paths[i] = run_trajectory(gen, psi0, config, static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (int i = 0; i < n; ++i)
    if (!failures[i].empty())
      throw Error(ErrorCode::RuntimeFailure, "trajectory " + std::to_string(i) + " failed: " + failures[i]);

  TrajectoryEnsemble e;
  e.n_traj = n;
  e.t = times;
  for (const auto& o : config.observables) e.names.push_back(o.name);
  e.channel_names = gen.channel_names;
  const Index nt = static_cast<Index>(times.size()), no = static_cast<Index>(config.observables.size());
  MatrixXr sum = MatrixXr::Zero(nt, no), sq = MatrixXr::Zero(nt, no);
  e.jump_histogram = MatrixXi::Zero(static_cast<Index>(gen.jumps.size()), std::max<Index>(nt - 1, 1));
  for (const auto& p : paths) {  // fixed order: stream index
    sum += p.observables;
    sq += p.observables.cwiseProduct(p.observables);
    for (const auto& j : p.jumps) {
      Index bin = static_cast<Index>(std::upper_bound(times.begin(), times.end(), j.t) - times.begin()) - 1;
      bin = std::clamp<Index>(bin, 0, e.jump_histogram.cols() - 1);
      ++e.jump_histogram(j.channel, bin);
      ++e.total_jumps;
    }
    if (config.pair_marginals) {
      if (e.pairs.empty()) e.pairs = p.pairs;
      else
        for (std::size_t a = 0; a < p.pairs.size(); ++a)
          for (std::size_t b = 0; b < p.pairs[a].size(); ++b) e.pairs[a][b] += p.pairs[a][b];
    }
  }
  e.mean = sum / n;
  e.stderr_ = MatrixXr::Zero(nt, no);
  if (n > 1) {
    const MatrixXr var = ((sq - sum.cwiseProduct(sum) / n) / (n - 1)).cwiseMax(0.0);
    e.stderr_ = (var / n).cwiseSqrt();
  }
  for (auto& row : e.pairs)
    for (auto& r : row) r /= static_cast<Real>(n);
  if (config.global_purity) {
    // Tr rho^2 = (1/M^2) sum_ij |<psi_i|psi_j>|^2
    e.purity = VectorXr::Zero(nt);
    MatrixXc block(gen.hilbert_dim(), n);
    for (Index ti = 0; ti < nt; ++ti) {
      for (int i = 0; i < n; ++i) block.col(i) = paths[i].states[ti];
      const MatrixXc gram = block.adjoint() * block;
      e.purity(ti) = gram.cwiseAbs2().sum() / (static_cast<Real>(n) * n);
    }
  }
  return e;
}

MatrixXr TrajectoryEnsemble::pair_entropies() const {
  MatrixXr s(static_cast<Index>(pairs.size()), pairs.empty() ? 0 : static_cast<Index>(pairs[0].size()));
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = 0; j < s.cols(); ++j) s(i, j) = chain::entropy(pairs[i][j]);
  return s;
}

MatrixXr TrajectoryEnsemble::pair_purities() const {
  MatrixXr s(static_cast<Index>(pairs.size()), pairs.empty() ? 0 : static_cast<Index>(pairs[0].size()));
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = 0; j < s.cols(); ++j) s(i, j) = chain::purity(pairs[i][j]);
  return s;
}

}  // namespace chiral::trajectories
