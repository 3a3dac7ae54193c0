#include "chiral/reservoir/channels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "chiral/parallel.hpp"

namespace chiral::reservoir {

const char* to_string(Side s) { return s == Side::Left ? "L" : "R"; }

Real lower_branch_omega(const ReservoirParams& params, const PlaneWaveSolution& pw, Real k) {
  return bdg_pair(params, pw, k).first.omega;
}

namespace {

Real bisect(const ReservoirParams& params, const PlaneWaveSolution& pw, Real a, Real b, Real omega) {
  Real fa = lower_branch_omega(params, pw, a) - omega;
  if (fa == 0.0) return a;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const Real mid = 0.5 * (a + b);
    const Real fm = lower_branch_omega(params, pw, mid) - omega;
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) a = mid, fa = fm;
    else b = mid;
  }
  return 0.5 * (a + b);
}

Real group_velocity(const ReservoirParams& params, const PlaneWaveSolution& pw, Real k, Real h) {
  auto d = [&](Real step) {
    return (lower_branch_omega(params, pw, k + step) - lower_branch_omega(params, pw, k - step)) / (2.0 * step);
  };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

Real interpolate(const std::vector<Real>& x, const std::vector<Real>& y, Real at) {
  auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const Real t = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - t) * y[i - 1] + t * y[i];
}

}  // namespace

std::vector<Real> lower_branch_crossings(const BdgSpectrum& s, Real omega) {
  const std::size_t n = s.k.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "spectrum grid too small");
  std::vector<Real> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = s.lower[i].omega;

  // Split into monotone segments at the discrete extrema.
  std::vector<std::size_t> cuts{0};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Real a = f[i] - f[i - 1], b = f[i + 1] - f[i];
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) cuts.push_back(i);
  }
  cuts.push_back(n - 1);

  std::vector<Real> roots;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    std::size_t lo = cuts[c], hi = cuts[c + 1];
    const Real flo = f[lo] - omega, fhi = f[hi] - omega;
    if (flo * fhi > 0.0 || (flo == 0.0 && fhi == 0.0)) continue;
    const bool rising = f[hi] > f[lo];
    // binary search for the bracketing cell inside the monotone run
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if ((f[mid] < omega) == rising) lo = mid;
      else hi = mid;
    }
    const Real r = bisect(s.params, s.pw, s.k[lo], s.k[hi], omega);
    if (roots.empty() || std::abs(r - roots.back()) > 1e-9) roots.push_back(r);
  }
  return roots;
}

ChannelPair resonant_channels(const BdgSpectrum& s, Real omega) {
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidArgument, "omega must be finite");
  if (omega <= 0.0)
    throw Error(ErrorCode::NotInChiralWindow, "omega=" + std::to_string(omega) + " is not above the lower branch");
  const auto roots = lower_branch_crossings(s, omega);
  if (roots.size() != 2)
    throw Error(ErrorCode::NotInChiralWindow,
                std::to_string(roots.size()) + " lower-branch crossings at omega=" + std::to_string(omega));
  const Real h = s.spacing() / 8.0;
  std::array<ChiralChannel, 2> ch;
  for (int i = 0; i < 2; ++i) {
    ch[i].k_res = roots[i];
    ch[i].v_group = group_velocity(s.params, s.pw, roots[i], h);
  }
  if (ch[0].v_group * ch[1].v_group >= 0.0)
    throw Error(ErrorCode::NotInChiralWindow, "both crossings propagate in the same direction");
  if (ch[0].v_group > 0.0) std::swap(ch[0], ch[1]);
  ch[0].side = Side::Left;
  ch[1].side = Side::Right;
  return {ch[0], ch[1]};
}

Real eta(Real k, Real k_m, Real omega, Real mass_ratio) { return (k - k_m) * (k - k_m) / (omega * mass_ratio); }

std::pair<Real, Real> decay_rates(ChannelPair& channels, const BdgSpectrum& s, Real omega) {
  std::vector<Real> qu(s.k.size()), qd(s.k.size());
  for (std::size_t i = 0; i < s.k.size(); ++i) qu[i] = s.lower[i].q_up, qd[i] = s.lower[i].q_down;
  const Real su = std::sqrt(s.pw.rho_up), sd = std::sqrt(s.pw.rho_down);
  for (ChiralChannel* c : {&channels.left, &channels.right}) {
    c->q_up = interpolate(s.k, qu, c->k_res);
    c->q_down = interpolate(s.k, qd, c->k_res);
    c->eta = eta(c->k_res, s.pw.k_m, omega, s.params.mass_ratio);
    const Real amp = s.params.g_au * su * c->q_up + s.params.g_ad * sd * c->q_down;
    c->gamma = c->eta * std::exp(-c->eta) / std::abs(c->v_group) * amp * amp;
  }
  return {channels.left.gamma, channels.right.gamma};
}

Real recentered_omega(const BdgSpectrum& s) {
  Real lower_max = 0.0;  // single-well lower branch: the window starts at zero
  for (std::size_t i = 1; i + 1 < s.k.size(); ++i) {
    const Real w = s.lower[i].omega;
    if (w >= s.lower[i - 1].omega && w >= s.lower[i + 1].omega) lower_max = std::max(lower_max, w);
  }
  Real upper_min = std::numeric_limits<Real>::infinity();
  for (const auto& m : s.upper) upper_min = std::min(upper_min, m.omega);
  if (upper_min <= lower_max)
    throw Error(ErrorCode::NotInChiralWindow, "no window between the lower-branch maximum and the upper branch");
  return 0.5 * (lower_max + upper_min);
}

std::optional<Real> q_up_zero_crossing(const BdgSpectrum& s, Real k_lo, Real k_hi) {
  for (std::size_t i = 0; i + 1 < s.k.size(); ++i) {
    if (s.k[i] < k_lo || s.k[i + 1] > k_hi) continue;
    const BdgMode &a = s.lower[i], &b = s.lower[i + 1];
    if (a.zero_mode || b.zero_mode || a.q_up * b.q_up > 0.0) continue;
    // The sign of an isolated mode is arbitrary; compare against the gauge-fixed neighbour.
    auto signed_q = [&](Real k) {
      const BdgMode m = bdg_pair(s.params, s.pw, k).first;
      const Real dot = m.u_plus * a.u_plus + m.u_minus * a.u_minus + m.v_plus * a.v_plus + m.v_minus * a.v_minus;
      return dot < 0.0 ? -m.q_up : m.q_up;
    };
    Real lo = s.k[i], hi = s.k[i + 1];
    const Real qa = signed_q(lo);
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
      const Real mid = 0.5 * (lo + hi);
      if ((signed_q(mid) > 0.0) == (qa > 0.0)) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

std::vector<AsymmetryRow> asymmetry_sweep(const ReservoirParams& params, Real omega,
                                          const std::vector<Real>& omega0_grid, const SweepOptions& opt) {
  std::vector<AsymmetryRow> rows(omega0_grid.size());
  const auto grid = default_k_grid(opt.grid_points, opt.k_min, opt.k_max);
  parallel_for(static_cast<Index>(omega0_grid.size()), [&](Index i) {
    AsymmetryRow& r = rows[i];
    r.omega0 = omega0_grid[i];
    r.omega = omega;
    try {
      ReservoirParams p = params;
      p.omega0 = omega0_grid[i];
      const PlaneWaveSolution pw = solve_plane_wave(p);
      r.q = pw.q;
      r.polarization = pw.rho_down / pw.rho_up;
      const BdgSpectrum s = bdg_modes(p, pw, grid);
      if (opt.recenter) r.omega = recentered_omega(s);
      ChannelPair ch = resonant_channels(s, r.omega);
      const auto [gl, gr] = decay_rates(ch, s, r.omega);
      r.gamma_l = gl;
      r.gamma_r = gr;
      r.ratio = gr > 0.0 ? gl / gr : std::numeric_limits<Real>::infinity();
      r.k_l = ch.left.k_res;
      r.k_r = ch.right.k_res;
      r.v_l = ch.left.v_group;
      r.v_r = ch.right.v_group;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  return rows;
}

}  // namespace chiral::reservoir
