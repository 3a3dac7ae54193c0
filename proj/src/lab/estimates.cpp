#include "chiral/lab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chiral/lab/presets.hpp"

namespace chiral::lab {

SetupReport validate_setup(const reservoir::ReservoirParams& params, Real omega, int n_spins,
                           const std::optional<LatticeSection>& lattice, const SetupOptions& options) {
  using namespace reservoir;
  if (n_spins < 1) throw Error(ErrorCode::InvalidArgument, "n_spins must be >= 1");
  if (!(options.rate_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate_scale must be positive");
  SetupReport out;
  out.n_spins = n_spins;

  const auto pw = solve_plane_wave(params);
  EpsilonOptions eo;
  eo.threshold = options.threshold;
  out.report = validity_epsilons(params, pw, eo);
  auto& r = out.report;

  const auto spectrum =
      bdg_modes(params, pw, default_k_grid(options.grid.grid_points, options.grid.k_min, options.grid.k_max));
  out.channels = resonant_channels(spectrum, omega);
  const auto [gl, gr] = decay_rates(out.channels, spectrum, omega);
  out.gamma_l = gl * options.rate_scale;
  out.gamma_r = gr * options.rate_scale;

  if (lattice && lattice->present) {
    const Real nd = n_spins * lattice->d;
    r.add("markov", "gamma_L << 2pi|v_L|/(N d)", out.gamma_l, 2.0 * kPi * std::abs(out.channels.left.v_group) / nd);
    r.add("markov", "gamma_R << 2pi|v_R|/(N d)", out.gamma_r, 2.0 * kPi * std::abs(out.channels.right.v_group) / nd);
  } else {
    out.notes.push_back("markov: no lattice given, retardation check skipped");
  }

  r.add("rwa", "gamma_L << Omega_0", out.gamma_l, params.omega0);
  r.add("rwa", "gamma_R << Omega_0", out.gamma_r, params.omega0);
  r.add("rwa", "gamma_L << omega", out.gamma_l, omega);
  r.add("rwa", "gamma_R << omega", out.gamma_r, omega);
  r.add("temperature", "k_B T << hbar omega", params.temperature, omega);

  if (lattice && lattice->present) {
    const Real k_lat = lattice->k_lat > 0.0 ? lattice->k_lat : kPi / lattice->d;
    const Real lhs = std::pow(2.0 / omega, 2) * std::pow(1.0 / params.mass_ratio, 2) * std::pow(k_lat, 4);
    r.add("deep_lattice", "(2E0/hw)^2 (m_b/m_a)^2 (k_lat/k0)^4 << 1", lhs, 1.0);
    // hbar^2 / (2 m_a) = 1 / mass_ratio in units where hbar^2 / (2 m_b) = 1
    if (lattice->v0 > 0.0) r.add("deep_lattice", "hbar^2 k_lat^2/2m_a << V0", k_lat * k_lat / params.mass_ratio, lattice->v0);
  }
  r.threshold = options.threshold;
  r.refresh();
  out.approximations_ok =
      r.group_ok("markov") && r.group_ok("rwa") && r.group_ok("temperature") && r.group_ok("deep_lattice");
  return out;
}

EstimatesReport estimates(const RbYbPreset& in, Real threshold) {
  using namespace reservoir;
  EstimatesReport out;
  out.input = in;
  out.units.e0_hz = in.e0_hz;
  out.units.mass_b_amu = in.mass_b_amu;
  const Real e0_j = out.units.e0_joule();
  const Real k0 = out.units.k0_per_m();

  const Real mass_b = in.mass_b_amu * si::amu, mass_a = in.mass_a_amu * si::amu;
  const Real mu = mass_a * mass_b / (mass_a + mass_b);
  out.coupling = g1d_from_scattering(in.a_scatter_bohr * si::a_bohr, 2.0 * kPi * in.omega_perp_hz, mu);
  if (out.coupling.confinement_warning) out.notes.push_back(out.coupling.warning);
  out.g_a = out.coupling.g / (e0_j / k0);

  auto& p = out.params;
  p.omega0 = in.omega0_rates;
  p.delta0 = in.delta0;
  p.k0 = out.units.k0_per_um();
  p.rho_bar = in.rho_bar_per_um * 1e6 / k0;
  p.g_uu = p.g_dd = p.g_ud = in.g_intra;
  p.g_au = p.g_ad = out.g_a;
  p.mass_ratio = in.mass_ratio;
  p.temperature = si::k_b * in.temperature_nk * 1e-9 / e0_j;
  out.omega = in.omega_hz / in.e0_hz;

  LatticeSection lat;
  lat.present = true;
  lat.d = in.d_nm * 1e-9 * k0;
  SetupOptions so;
  so.threshold = threshold;
  out.validity = validate_setup(p, out.omega, in.n_spins, lat, so);
  out.gamma_l = out.validity.gamma_l;
  out.gamma_r = out.validity.gamma_r;
  // gamma [E0/hbar] -> gamma / 2 pi [Hz]
  out.gamma_l_hz = out.gamma_l * in.e0_hz;
  out.gamma_r_hz = out.gamma_r * in.e0_hz;

  const auto rows = asymmetry_sweep(p, out.omega, linspace(in.sweep_from, in.sweep_to, in.sweep_steps));
  out.ratio_min = out.gamma_r_hz_min = std::numeric_limits<Real>::infinity();
  out.ratio_max = out.gamma_r_hz_max = 0.0;
  for (const auto& row : rows) {
    if (!row.ok()) {
      ++out.sweep_failures;
      continue;
    }
    out.ratio_min = std::min(out.ratio_min, row.ratio);
    out.ratio_max = std::max(out.ratio_max, row.ratio);
    out.gamma_r_hz_min = std::min(out.gamma_r_hz_min, row.gamma_r * in.e0_hz);
    out.gamma_r_hz_max = std::max(out.gamma_r_hz_max, row.gamma_r * in.e0_hz);
  }
  if (out.sweep_failures) out.notes.push_back(std::to_string(out.sweep_failures) + " sweep points outside the chiral window");

  const Real omega0_rad = in.omega0_max * 2.0 * kPi * in.e0_hz;
  out.photon = photon_scattering_lifetime(omega0_rad, in.scattering_ratio / 12.0);
  out.tau_d_line_s = photon_scattering_lifetime(omega0_rad, in.d_line_width_hz, in.fine_structure_hz).tau;
  out.t_ss_s = in.tss_gamma / (out.gamma_r * 2.0 * kPi * in.e0_hz);

  out.two_delta0_hz = 2.0 * std::abs(in.delta0) * in.e0_hz;
  std::ostringstream os;
  os << "2|delta0|/2pi = " << out.two_delta0_hz << " Hz from delta0 = " << in.delta0 << " E0; the Rb estimate quotes >= "
     << in.two_delta0_quoted_hz << " Hz";
  out.notes.push_back(os.str());
  return out;
}

}  // namespace chiral::lab
