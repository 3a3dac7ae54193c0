#include "chiral/reservoir/physical.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace chiral::reservoir {

Coupling1d g1d_from_scattering(Real a_s, Real omega_perp, Real mass) {
  if (!std::isfinite(a_s) || !(omega_perp > 0.0) || !(mass > 0.0))
    throw Error(ErrorCode::InvalidArgument, "g1d needs finite a_s and positive omega_perp, mass");
  Coupling1d c;
  c.g = 2.0 * si::hbar * omega_perp * a_s;
  c.l_perp = std::sqrt(si::hbar / (mass * omega_perp));
  c.ratio = std::abs(a_s) / c.l_perp;
  if (c.ratio > 0.1) {
    c.confinement_warning = true;
    std::ostringstream os;
    os << "ConfinementResonanceWarning: |a_s|/l_perp = " << c.ratio << " > 0.1";
    c.warning = os.str();
  }
  return c;
}

PhotonScattering photon_scattering_lifetime(Real omega0, Real line_to_splitting) {
  if (!(omega0 >= 0.0) || !(line_to_splitting > 0.0))
    throw Error(ErrorCode::InvalidArgument, "photon scattering needs omega0 >= 0 and a positive line ratio");
  PhotonScattering s;
  s.gamma_sc = 12.0 * line_to_splitting * omega0;
  s.tau = s.gamma_sc > 0.0 ? 2.0 * kPi / s.gamma_sc : std::numeric_limits<Real>::infinity();
  return s;
}

PhotonScattering photon_scattering_lifetime(Real omega0, Real gamma_line, Real splitting) {
  if (!(gamma_line > 0.0) || !(splitting > 0.0))
    throw Error(ErrorCode::InvalidArgument, "line width and fine-structure splitting must be positive");
  return photon_scattering_lifetime(omega0, gamma_line / splitting);
}

}  // namespace chiral::reservoir
