// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "chiral/chain/evolve.hpp"
#include "chiral/chain/observables.hpp"
#include "chiral/chain/operators.hpp"
#include "chiral/chain/scans.hpp"
#include "chiral/chain/spectrum.hpp"
#include "chiral/lab/estimates.hpp"
#include "chiral/lab/presets.hpp"
#include "chiral/reservoir.hpp"
#include "chiral/trajectories.hpp"

using namespace chiral;
namespace ch = chiral::chain;
namespace rs = chiral::reservoir;
namespace tr = chiral::trajectories;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

Real seconds_since(Clock::time_point t0) {
  return std::chrono::duration<Real>(Clock::now() - t0).count();
}

std::string num(Real v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

ch::ChainParams chain_params(int n, Real gamma_l, Real rabi = 0.5) {
  ch::ChainParams p;
  p.n_spins = n;
  p.rabi = rabi;
  p.gamma_l = gamma_l;
  p.gamma_r = 1.0;
  return p;
}

// Product of pair states (|gg> + a/sqrt2 |ge> - a/sqrt2 |eg>)/sqrt(1+|a|^2),
// a = 2 i sqrt2 conj(Omega) / delta_gamma, built on the site-mask basis.
VectorXc dimer_oracle(int n, Complex rabi, Real delta_gamma) {
  const Complex a = 2.0 * kI * std::sqrt(2.0) * std::conj(rabi) / delta_gamma;
  const Real norm = std::sqrt(1.0 + std::norm(a));
  const Index dim = ch::hilbert_dim(n);
  VectorXc psi = VectorXc::Zero(dim);
  for (Index s = 0; s < dim; ++s) {
    Complex amp = 1.0;
    for (int j = 0; j + 1 < n && amp != Complex(0.0); j += 2) {
      const bool e1 = s & ch::site_mask(n, j), e2 = s & ch::site_mask(n, j + 1);
      if (!e1 && !e2) amp *= 1.0 / norm;
      else if (!e1 && e2) amp *= a / std::sqrt(2.0) / norm;
      else if (e1 && !e2) amp *= -a / std::sqrt(2.0) / norm;
      else amp = 0.0;
    }
    psi(s) = amp;
  }
  return psi;
}

// Time after which the series stays below `level`, or NaN if it never settles.
// Also NaN when the series never rose to `level` (nothing to settle from).
Real settle_time(const std::vector<Real>& t, const std::vector<Real>& s, Real level) {
  bool rose = false;
  for (Real v : s) rose = rose || v >= level;
  if (!rose) return std::nan("");
  for (std::size_t i = s.size(); i-- > 0;)
    if (s[i] >= level) return i + 1 < s.size() ? t[i + 1] : std::nan("");
  return t.front();
}

Real two_level_purity(Real rabi, Real gamma) {
  const Real d = gamma * gamma + 8.0 * rabi * rabi;
  const Real pe = 4.0 * rabi * rabi / d, coh = 2.0 * rabi * gamma / d;
  return (1.0 - pe) * (1.0 - pe) + pe * pe + 2.0 * coh * coh;
}

// 1. Dimer steady state.
void dimer_steady_state(Outcome& o) {
  for (int n : {2, 4, 6})
    for (Real gl : {0.0, 0.4}) {
      const auto t0 = Clock::now();
      const auto p = chain_params(n, gl);
      const auto ss = ch::steady_state(ch::build_liouvillian(p));
      const Real f = ch::fidelity(ss.rho, dimer_oracle(n, p.rabi, p.delta_gamma()));
      const Real pur = ch::purity(ss.rho);
      const Real dt = seconds_since(t0);
      o.require(ss.nullspace_dim == 1 && f > 1.0 - 1e-8 && pur > 1.0 - 1e-8 && dt < 60.0,
                "N=" + std::to_string(n) + " gL=" + num(gl) + ": dim " + std::to_string(ss.nullspace_dim) +
                    ", 1-F " + num(1.0 - f, 2) + ", 1-P " + num(1.0 - pur, 2) + ", " + num(dt, 3) + " s");
    }
}

// 2. Dimerization dynamics from |g...g>.
void purification_order(Outcome& o) {
  const auto t_start = Clock::now();
  {  // (a) N = 10 cascaded, trajectories
    const auto p = chain_params(10, 0.0);
    const auto gen = tr::unravel(p);
    tr::TrajectoryConfig cfg;
    cfg.seed = 1;
    cfg.n_traj = 128;
    cfg.t_final = 150.0;
    cfg.t_grid = lab::linspace(0.0, 150.0, 151);
    cfg.pair_marginals = true;
    const auto ens = tr::ensemble_average(gen, ch::ground_state(10), cfg);
    const MatrixXr s = ens.pair_entropies();
    std::vector<Real> settle;
    for (int j = 0; j < 10; j += 2) {
      std::vector<Real> col(s.rows());
      for (Index i = 0; i < s.rows(); ++i) col[i] = s(i, j);
      settle.push_back(settle_time(ens.t, col, 0.01));
    }
    bool ordered = true;
    std::string times;
    for (std::size_t j = 0; j < settle.size(); ++j) {
      ordered = ordered && std::isfinite(settle[j]) && (j == 0 || settle[j] > settle[j - 1]);
      times += (j ? "," : "") + num(settle[j]);
    }
    o.require(ordered, "(a) N=10 S_2j-1,2j < 0.01 from t = " + times);
  }
  {  // (c) N = 9 cascaded, density matrix
    const auto p = chain_params(9, 0.0);
    const auto l = ch::build_liouvillian(p);
    const auto grid = lab::linspace(0.0, 200.0, 201);
    std::vector<std::vector<Real>> s(4);
    Real last_purity = 0.0;
    ch::EvolveOptions eo;
    eo.rtol = 1e-9;
    eo.atol = 1e-11;
    ch::evolve(
        l, ch::pure_density(ch::ground_state(9)), grid,
        [&](Real, const ch::DensityMatrix& rho) {
          for (int j = 0; j < 4; ++j) s[j].push_back(ch::entropy(ch::reduced_pair(rho, 2 * j, 2 * j + 1)));
          last_purity = ch::purity(ch::reduced_site(rho, 8));
        },
        eo);
    bool settled = true;
    std::string times;
    for (int j = 0; j < 4; ++j) {
      const Real ts = settle_time(grid, s[j], 0.01);
      settled = settled && std::isfinite(ts);
      times += (j ? "," : "") + num(ts);
    }
    const Real target = two_level_purity(0.5, 1.0);
    o.require(settled, "(c) N=9 four pairs < 0.01 from t = " + times);
    o.require(std::abs(last_purity - target) < 1e-3,
              "last spin purity " + num(last_purity, 6) + " vs " + num(target, 6));
  }
  {  // (d) N = 9 bidirectional, trajectories to t = 1000
    const auto p = chain_params(9, 0.4);
    const auto gen = tr::unravel(p);
    tr::TrajectoryConfig cfg;
    cfg.seed = 1;
    cfg.n_traj = 64;
    cfg.t_final = 1000.0;
    cfg.t_grid = {0.0, 500.0, 1000.0};
    cfg.pair_marginals = true;
    const auto ens = tr::ensemble_average(gen, ch::ground_state(9), cfg);
    const MatrixXr s = ens.pair_entropies();
    const Real smin = s.row(s.rows() - 1).minCoeff();
    o.require(smin > 0.1, "(d) N=9 gL=0.4 min S_j,j+1(1000) = " + num(smin));
  }
  const Real dt = seconds_since(t_start);
  o.require(dt < 1800.0, num(dt, 4) + " s");
}

// 3. Relaxation-time scaling.
void gap_scaling(Outcome& o) {
  const auto t0 = Clock::now();
  for (int n : {4, 6}) {
    const auto ratios = lab::linspace(0.5, 0.9, 5);
    const auto rows = ch::gap_scan(chain_params(n, 0.0), ch::GapAxis::GammaRatio, ratios);
    std::vector<Real> x, y;
    for (const auto& r : rows)
      if (r.error.empty()) {
        x.push_back(1.0 - r.value);
        y.push_back(r.t_ss);
      }
    const auto fit = ch::fit_power_law(x, y);
    o.require(x.size() == ratios.size() && std::abs(fit.slope + 4.0) <= 0.3,
              "N=" + std::to_string(n) + " slope vs 1-gL/gR " + num(fit.slope));

    const auto rabis = lab::logspace(2.0, 8.0, 5);
    const auto rrows = ch::gap_scan(chain_params(n, 0.2), ch::GapAxis::Rabi, rabis);
    x.clear();
    y.clear();
    for (const auto& r : rrows)
      if (r.error.empty()) {
        x.push_back(r.value);
        y.push_back(r.t_ss);
      }
    const auto rfit = ch::fit_power_law(x, y);
    o.require(x.size() == rabis.size() && std::abs(rfit.slope - 2.0) <= 0.3,
              "N=" + std::to_string(n) + " slope vs Omega " + num(rfit.slope));
  }
  const Real dt = seconds_since(t0);
  o.require(dt < 600.0, num(dt, 4) + " s");
}

// 4. Multiple steady states without asymmetry.
void degeneracy(Outcome& o) {
  const auto t0 = Clock::now();
  const auto ss = ch::steady_state(ch::build_liouvillian(chain_params(4, 1.0)));
  const Real dt = seconds_since(t0);
  o.require(ss.nullspace_dim > 1, "N=4 gL=gR nullspace_dim " + std::to_string(ss.nullspace_dim));
  o.require(dt < 60.0, num(dt, 3) + " s");
}

// 5. Robustness to a commensurability mismatch.
void robustness(Outcome& o) {
  const auto t0 = Clock::now();
  const auto rows = ch::imperfection_scan(chain_params(6, 0.1), ch::Imperfection::Epsilon, {0.1});
  const auto& r = rows.front();
  bool ok = r.error.empty() && !r.pair_purities.empty();
  std::string vals;
  for (Real v : r.pair_purities) {
    ok = ok && v >= 0.9;
    vals += (vals.empty() ? "" : ",") + num(v);
  }
  const Real dt = seconds_since(t0);
  o.require(ok, "N=6 gL=0.1 eps=0.1 P_pairs " + vals + (r.error.empty() ? "" : " " + r.error));
  o.require(dt < 300.0, num(dt, 3) + " s");
}

// 6. Reservoir physics.
void reservoir_physics(Outcome& o) {
  const auto t0 = Clock::now();
  Real worst_q = 0.0;
  for (Real d = 0.0; d <= 0.2 + 1e-12; d += 0.01)
    for (Real c = 0.0; c <= 0.01 + 1e-12; c += 0.001)
      worst_q = std::max(worst_q, std::abs(rs::solve_quartic(c, d) - (1.0 - d * d / 2.0)));
  o.require(worst_q < 1e-3, "(i) |q - (1 - D^2/2)| <= " + num(worst_q, 3));

  const auto p = lab::fig2_reservoir();
  const auto pw = rs::solve_plane_wave(p);
  const auto sp = rs::bdg_modes(p, pw, rs::default_k_grid(4096));
  Real worst_n = 0.0;
  for (const auto* branch : {&sp.lower, &sp.upper})
    for (const auto& m : *branch)
      if (!m.zero_mode) worst_n = std::max(worst_n, std::abs(m.symplectic_norm() - 1.0));
  o.require(worst_n < 1e-10, "(ii) |u^2 - v^2 - 1| <= " + num(worst_n, 3));

  const auto fig = lab::figure_preset("fig2a");
  Real lo = INFINITY, hi = 0.0;
  int failed = 0;
  for (const auto& r : rs::asymmetry_sweep(fig.curves[0].reservoir, fig.omega, fig.omega0_grid)) {
    if (!r.ok()) {
      ++failed;
      continue;
    }
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  o.require(lo < 1e-2 && hi > 1.0, "(iii) gL/gR in [" + num(lo, 3) + ", " + num(hi, 4) + "] over " +
                                       std::to_string(fig.omega0_grid.size() - failed) + " points (" +
                                       std::to_string(failed) + " outside the chiral window)");

  // (iv) g_ad = 0: tune Omega_0 onto the zero of Q_up at k_L
  const auto& zero = fig.curves[1].reservoir;
  const auto rows = rs::asymmetry_sweep(zero, fig.omega, fig.omega0_grid);
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].ok() && (!rows[best].ok() || rows[i].ratio < rows[best].ratio)) best = i;
  auto ratio_at = [&](Real w0) {
    const auto r = rs::asymmetry_sweep(zero, fig.omega, {w0}).front();
    return r.ok() ? r.ratio : 1.0;
  };
  const Real a = fig.omega0_grid[best > 0 ? best - 1 : 0];
  const Real b = fig.omega0_grid[std::min(best + 1, fig.omega0_grid.size() - 1)];
  const auto [w0, rmin] = boost::math::tools::brent_find_minima(ratio_at, a, b, 40);
  o.require(rmin < 1e-3, "(iv) g_ad=0 min gL/gR " + num(rmin, 3) + " at Omega0 = " + num(w0, 5));

  const Real dt = seconds_since(t0);
  o.require(dt < 300.0, num(dt, 3) + " s");
}

// 7. Rb/Yb estimates.
void estimates(Outcome& o) {
  const auto t0 = Clock::now();
  const auto e = lab::estimates();
  o.require(e.gamma_r_hz > 100.0 / 3.0 && e.gamma_r_hz < 300.0, "gR/2pi " + num(e.gamma_r_hz) + " Hz");
  o.require(e.photon.tau >= 14.0, "tau " + num(e.photon.tau) + " s");
  std::string groups;
  for (const char* g : {"markov", "rwa", "temperature", "deep_lattice"}) {
    Real w = 0.0;
    for (const auto& c : e.validity.report.checks)
      if (c.group == g) w = std::max(w, c.ratio);
    groups += std::string(groups.empty() ? "" : ", ") + g + " " + num(w, 3) +
              (e.validity.report.group_ok(g) ? "" : "!");
  }
  o.require(e.validity.approximations_ok, "validate N=30 d=800nm (" + groups + ")");
  const Real dt = seconds_since(t0);
  o.require(dt < 60.0, num(dt, 3) + " s");
}

// 8. Trajectory unraveling.
void trajectory_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<Real> u(0.0, 1.0);
  Real worst = 0.0, worst_defect = 0.0;
  tr::UnravelOptions uo;
  uo.check_max_spins = 0;
  for (int n = 1; n <= 6; ++n)
    for (int draw = 0; draw < 50; ++draw) {
      ch::ChainParams p;
      p.n_spins = n;
      p.rabi = Complex(u(rng) - 0.5, u(rng) - 0.5);
      p.detuning = u(rng) - 0.5;
      p.gamma_l = 1.5 * u(rng);
      p.gamma_r = 1.5 * u(rng);
      p.epsilon_comm = 3.0 * u(rng);
      p.gamma_prime = 0.4 * u(rng);
      const auto gen = tr::unravel(p, uo);
      const SparseMatrixC diff = tr::reconstruct_liouvillian(gen) - ch::build_liouvillian(p).to_sparse();
      for (Index k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
      worst_defect = std::max(worst_defect, tr::dissipator_defect(gen));
    }
  o.require(worst < 1e-9, "residual " + num(worst, 3) + " over 300 draws, N=1..6");
  o.require(worst_defect < 1e-10, "defect " + num(worst_defect, 3));

  // N = 4 ensemble against the master equation
  const auto p = chain_params(4, 0.4);
  const auto gen = tr::unravel(p);
  tr::TrajectoryConfig cfg;
  cfg.seed = 1;
  cfg.n_traj = 2000;
  cfg.t_final = 50.0;
  cfg.t_grid = lab::linspace(5.0, 50.0, 10);
  cfg.observables = tr::site_populations(4);
  const auto dimers = tr::dimer_populations(4, ch::dimer_product(p).alpha);
  cfg.observables.insert(cfg.observables.end(), dimers.begin(), dimers.end());
  const VectorXc psi0 = ch::ground_state(4);
  const auto ens = tr::ensemble_average(gen, psi0, cfg);
  const auto rhos = ch::evolve(ch::build_liouvillian(p), ch::pure_density(psi0), cfg.t_grid);
  const VectorXc d = ch::dimer_product(2, ch::dimer_product(p).alpha).state;
  Real chi2 = 0.0, zmax = 0.0;
  int dof = 0;
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
    std::vector<Real> exact;
    for (int j = 0; j < 4; ++j) exact.push_back(ch::reduced_site(rhos[i], j)(1, 1).real());
    for (int j = 0; j < 2; ++j) exact.push_back(d.dot(ch::reduced_pair(rhos[i], 2 * j, 2 * j + 1) * d).real());
    for (std::size_t k = 0; k < exact.size(); ++k) {
      const Real z = (ens.mean(static_cast<Index>(i), static_cast<Index>(k)) - exact[k]) /
                     ens.stderr_(static_cast<Index>(i), static_cast<Index>(k));
      zmax = std::max(zmax, std::abs(z));
      chi2 += z * z;
      ++dof;
    }
  }
  o.require(zmax < 3.0 && chi2 / dof < 2.0, "N=4 2000 traj: max |z| " + num(zmax, 3) + ", chi2/dof " +
                                                num(chi2 / dof, 3) + " (" + std::to_string(dof) + " points)");

  long jumps = 0;
  for (int n : {2, 4, 6, 8, 10}) {
    const auto q = chain_params(n, 0.0);
    tr::TrajectoryConfig dc;
    dc.seed = 1;
    dc.n_traj = 16;
    dc.t_final = 100.0;
    dc.t_grid = {0.0, 100.0};
    jumps += tr::ensemble_average(tr::unravel(q), ch::dimer_product(q).state, dc).total_jumps;
  }
  o.require(jumps == 0, "dark-state jumps " + std::to_string(jumps) + " (N=2..10, t=100)");
  const Real dt = seconds_since(t0);
  o.require(dt < 900.0, num(dt, 4) + " s");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "dimer steady state", dimer_steady_state},
      {2, "purification dynamics", purification_order},
      {3, "gap scaling", gap_scaling},
      {4, "degeneracy without asymmetry", degeneracy},
      {5, "robustness to epsilon", robustness},
      {6, "reservoir physics", reservoir_physics},
      {7, "Rb/Yb estimates", estimates},
      {8, "trajectory equivalence", trajectory_equivalence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      c.fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
