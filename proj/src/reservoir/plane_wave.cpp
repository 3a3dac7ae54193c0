#include "chiral/reservoir/plane_wave.hpp"

#include <cmath>
#include <sstream>

namespace chiral::reservoir {

void validate(const ReservoirParams& p) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  for (Real v : {p.omega0, p.delta0, p.rho_bar, p.g_uu, p.g_dd, p.g_ud, p.g_au, p.g_ad, p.mass_ratio, p.length_L,
                 p.temperature, p.coarse_length})
    if (!std::isfinite(v)) bad("non-finite reservoir parameter");
  if (p.rho_bar <= 0.0) bad("rho_bar must be positive");
  if (p.delta0 >= 0.0) bad("delta0 must be negative");
  if (p.omega0 < 0.0) bad("omega0 must be non-negative");
  if (p.g_uu < 0.0 || p.g_dd < 0.0 || p.g_ud < 0.0) bad("intraspecies couplings must be non-negative");
  if (p.mass_ratio <= 0.0) bad("mass_ratio must be positive");
  if (p.temperature < 0.0) bad("temperature must be non-negative");
  if (p.coarse_length <= 0.0) bad("coarse_length must be positive");
  const Real lhs = 2.0 * p.g2() + p.g3();
  if (lhs >= std::abs(p.delta0)) {
    std::ostringstream os;
    os << "2 G2 + G3 = " << lhs << " >= |delta0| = " << std::abs(p.delta0);
    throw Error(ErrorCode::PhaseConditionViolated, os.str());
  }
}

Real quartic_residual(Real q, Real C, Real D) {
  return q * q * q * q + 2.0 * C * q * q * q + (C * C + D * D - 1.0) * q * q - 2.0 * C * q - C * C;
}

Real solve_quartic(Real C, Real D) {
  if (!std::isfinite(C) || !std::isfinite(D)) throw Error(ErrorCode::NoPositiveRoot, "non-finite quartic coefficients");
  if (C == 0.0) {
    // q^2 (q^2 - 1 + D^2) = 0
    if (D * D >= 1.0) throw Error(ErrorCode::NoPositiveRoot, "C = 0 and D >= 1 leaves no positive root");
    return std::sqrt(1.0 - D * D);
  }
  // f(q) = (q + C)^2 (q^2 - 1) + D^2 q^2 with f(0) = -C^2 < 0 and f(1) = D^2 >= 0.
  Real lo = 0.0, hi = 1.0 + std::abs(C);
  if (quartic_residual(hi, C, D) <= 0.0) throw Error(ErrorCode::NoPositiveRoot, "quartic not bracketed on [0, 1 + |C|]");
  while (hi - lo > 1e-14) {
    const Real mid = 0.5 * (lo + hi);
    if (quartic_residual(mid, C, D) < 0.0) lo = mid;
    else hi = mid;
  }
  Real q = 0.5 * (lo + hi);
  const Real df = 4.0 * q * q * q + 6.0 * C * q * q + 2.0 * (C * C + D * D - 1.0) * q - 2.0 * C;
  if (df != 0.0) {
    const Real polished = q - quartic_residual(q, C, D) / df;
    if (polished > 0.0 &&
        std::abs(quartic_residual(polished, C, D)) <= std::abs(quartic_residual(q, C, D)))
      q = polished;
  }
  if (q <= 0.0 || q > 1.0 + 1e-14) throw Error(ErrorCode::NoPositiveRoot, "quartic root outside (0, 1]");
  q = std::min(q, 1.0);
  return q;
}

PlaneWaveSolution solve_plane_wave(const ReservoirParams& p) {
  validate(p);
  const Real g1 = p.g1(), g2 = p.g2(), g3 = p.g3();
  const Real ad = std::abs(p.delta0);
  if (g2 >= 1.0) throw Error(ErrorCode::NoPositiveRoot, "G2 >= E0: quartic coefficients undefined");
  PlaneWaveSolution s;
  s.C = (ad - g3) / (2.0 * (1.0 - g2));
  s.D = p.omega0 / (2.0 * (1.0 - g2));
  s.q = solve_quartic(s.C, s.D);
  s.k_m = s.q;
  const Real q = s.q;
  const Real root = std::sqrt(std::max(0.0, 1.0 - q * q));
  s.mu = 1.0 + 2.0 * g1 - q * (ad - 2.0 * g3) - q * q * (1.0 - 2.0 * g2) - p.omega0 * root;
  s.e_gs_per_particle = 1.0 + g1 - q * (ad - g3) - q * q * (1.0 - g2) - p.omega0 * root;
  s.rho_up = p.rho_bar * (1.0 + q) / 2.0;
  s.rho_down = p.rho_bar - s.rho_up;
  s.theta_q = std::atan2(q, root);
  return s;
}

}  // namespace chiral::reservoir
