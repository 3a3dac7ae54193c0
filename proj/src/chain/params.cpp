#include "chiral/chain/params.hpp"

#include <cmath>
#include <string>

namespace chiral::chain {

Complex ChainParams::site_rabi(int j) const {
  if (site_phases.empty()) return rabi;
  return rabi * std::exp(kI * site_phases.at(static_cast<std::size_t>(j)));
}

void validate(const ChainParams& p) {
  if (p.n_spins < 1) throw Error(ErrorCode::InvalidArgument, "n_spins must be >= 1");
  if (p.gamma_l < 0.0 || p.gamma_r < 0.0 || p.gamma_prime < 0.0)
    throw Error(ErrorCode::InvalidArgument, "decay rates must be non-negative");
  if (!p.site_phases.empty() && static_cast<int>(p.site_phases.size()) != p.n_spins)
    throw Error(ErrorCode::InvalidArgument, "site_phases needs one entry per spin, got " +
                                                std::to_string(p.site_phases.size()));
  for (Real v : {p.rabi.real(), p.rabi.imag(), p.detuning, p.gamma_l, p.gamma_r, p.epsilon_comm, p.gamma_prime})
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite chain parameter");
}

Orientation orient(const ChainParams& p) {
  validate(p);
  Orientation o;
  o.built = p;
  o.physical_site.resize(static_cast<std::size_t>(p.n_spins));
  o.mirrored = p.gamma_l > p.gamma_r;
  for (int a = 0; a < p.n_spins; ++a) o.physical_site[a] = o.mirrored ? p.n_spins - 1 - a : a;
  if (o.mirrored) {
    std::swap(o.built.gamma_l, o.built.gamma_r);
    if (!p.site_phases.empty())
      for (int a = 0; a < p.n_spins; ++a) o.built.site_phases[a] = p.site_phases[o.physical_site[a]];
  }
  return o;
}

ChainCoefficients chain_coefficients(const ChainParams& params) {
  const Orientation o = orient(params);
  const ChainParams& p = o.built;
  const int n = p.n_spins;
  const Real gl = p.gamma_l;
  const Real dg = p.delta_gamma();
  const Real gp = p.gamma_prime;

  MatrixXc m = MatrixXc::Zero(n, n);
  MatrixXc c = MatrixXc::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Real phi = (a - b) * p.epsilon_comm / 2.0;
      // symmetric (bidirectional) part
      Complex mab = -kI * gl * std::sin(std::abs(phi)) - gl * std::cos(phi);
      Complex cab = 2.0 * gl * std::cos(phi);
      // cascaded part
      if (a == b) {
        mab -= (dg + gp) / 2.0;
        cab += dg + gp;
      } else {
        cab += dg * std::exp(-kI * phi);
        if (a > b) mab -= dg * std::exp(kI * phi);
      }
      m(o.physical_site[a], o.physical_site[b]) = mab;
      c(o.physical_site[a], o.physical_site[b]) = cab;
    }
  }

  ChainCoefficients out;
  out.n_spins = n;
  out.m = std::move(m);
  out.c = std::move(c);
  out.drive.resize(n);
  for (int a = 0; a < n; ++a) out.drive(o.physical_site[a]) = p.site_rabi(a);
  out.detuning = p.detuning;
  out.mirrored = o.mirrored;
  return out;
}

}  // namespace chiral::chain
