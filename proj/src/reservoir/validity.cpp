#include "chiral/reservoir/validity.hpp"

#include <cmath>
#include <limits>

namespace chiral::reservoir {

void ValidityReport::add(const std::string& group, const std::string& name, Real lhs, Real rhs) {
  ValidityCheck c;
  c.group = group;
  c.name = name;
  c.lhs = lhs;
  c.rhs = rhs;
  c.ratio = rhs == 0.0 ? std::numeric_limits<Real>::infinity() : std::abs(lhs / rhs);
  checks.push_back(c);
  refresh();
}

void ValidityReport::refresh() {
  for (auto& c : checks) c.ok = c.ratio < threshold;
  markov_ok = group_ok("markov");
  rwa_ok = group_ok("rwa");
  quasi_bec_ok = group_ok("quasi_bec");
  deep_lattice_ok = group_ok("deep_lattice");
  expansion_ok = group_ok("expansion");
  temperature_ok = group_ok("temperature");
}

bool ValidityReport::evaluated(const std::string& group) const {
  for (const auto& c : checks)
    if (c.group == group) return true;
  return false;
}

bool ValidityReport::group_ok(const std::string& group) const {
  for (const auto& c : checks)
    if (c.group == group && !(c.ratio < threshold)) return false;
  return true;
}

bool ValidityReport::all_ok() const {
  for (const auto& c : checks)
    if (!(c.ratio < threshold)) return false;
  return true;
}

Real healing_length(const ReservoirParams& p) { return 1.0 / std::sqrt(p.g1()); }

Real thermal_wavelength(const ReservoirParams& p) {
  // hbar^2 / m_b = 2 in these units
  if (p.temperature <= 0.0) return std::numeric_limits<Real>::infinity();
  return std::sqrt(4.0 * kPi / p.temperature);
}

ValidityReport validity_epsilons(const ReservoirParams& params, const PlaneWaveSolution& pw,
                                 const EpsilonOptions& opt) {
  validate(params);
  if (opt.points < 3 || opt.points % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "epsilon grid needs an odd number of points >= 3");
  const Real l = params.coarse_length;
  const Real p_max = kPi / l;
  const Index n = opt.points;
  const Real h = 2.0 * p_max / static_cast<Real>(n - 1);
  const Real rho_alpha = params.rho_bar / 2.0;
  const Real sqrt_rho = std::sqrt(rho_alpha);
  const Real temp = params.temperature;

  Real i1p = 0, i1m = 0, i2p = 0, i2m = 0, i3 = 0;
  for (Index i = 0; i < n; ++i) {
    if (2 * i == n - 1) continue;  // p = 0: Goldstone node, integrable and excluded
    const Real p = -p_max + h * static_cast<Real>(i);
    const Real w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    const auto [lo, up] = bdg_pair(params, pw, pw.k_m + p);
    for (const BdgMode* m : {&lo, &up}) {
      Real occ = 0.0;
      if (temp > 0.0) {
        if (m->omega <= 0.0)
          throw Error(ErrorCode::IntegrandSingular, "zero-frequency mode at p=" + std::to_string(p) + " with T > 0");
        occ = 1.0 / std::expm1(m->omega / temp);
      }
      const Real f = w * (2.0 * occ + 1.0);
      const Real sp = m->u_plus + m->v_plus, sm = m->u_minus + m->v_minus;
      const Real dp = m->u_plus - m->v_plus, dm = m->u_minus - m->v_minus;
      i1p += f * sp * sp;
      i1m += f * sm * sm;
      i2p += f * p * p * dp * dp;
      i2m += f * p * p * dm * dm;
      const Real rel = (dp - dm) / sqrt_rho;
      i3 += f * rel * rel;
    }
  }
  ValidityReport r;
  r.threshold = opt.threshold;
  r.eps1_up = std::sqrt(i1p / (2.0 * kPi * rho_alpha));
  r.eps1_down = std::sqrt(i1m / (2.0 * kPi * rho_alpha));
  r.eps2_up = l * std::sqrt(i2p / (8.0 * kPi * rho_alpha));
  r.eps2_down = l * std::sqrt(i2m / (8.0 * kPi * rho_alpha));
  r.eps3 = std::sqrt(i3 / (8.0 * kPi));

  r.add("expansion", "eps1_up", r.eps1_up, 1.0);
  r.add("expansion", "eps1_down", r.eps1_down, 1.0);
  r.add("expansion", "eps2_up", r.eps2_up, 1.0);
  r.add("expansion", "eps2_down", r.eps2_down, 1.0);
  r.add("expansion", "eps3", r.eps3, 1.0);
  r.add("quasi_bec", "1/rho_bar << l", 1.0 / params.rho_bar, l);
  r.add("quasi_bec", "l << xi", l, healing_length(params));
  r.add("quasi_bec", "l << lambda_T", l, thermal_wavelength(params));
  r.add("quasi_bec", "l << pi/k_max", l, kPi);
  return r;
}

}  // namespace chiral::reservoir
