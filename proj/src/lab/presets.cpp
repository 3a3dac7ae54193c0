#include "chiral/lab/presets.hpp"

#include <cmath>

namespace chiral::lab {

std::vector<Real> linspace(Real a, Real b, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "linspace needs n >= 1");
  std::vector<Real> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<Real> logspace(Real a, Real b, int n) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "logspace needs positive ends");
  auto v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  return v;
}

reservoir::ReservoirParams fig2_reservoir() {
  reservoir::ReservoirParams p;
  p.omega0 = 0.2;
  p.delta0 = -0.004;
  p.rho_bar = 6.14;
  p.g_uu = p.g_dd = p.g_ud = 0.23;
  p.g_au = p.g_ad = -0.37;
  p.mass_ratio = 2.0;
  return p;
}

namespace {

chain::ChainParams chain_point(int n, Real gamma_l) {
  chain::ChainParams c;
  c.n_spins = n;
  c.rabi = Complex(0.5, 0.0);
  c.gamma_r = 1.0;
  c.gamma_l = gamma_l;
  return c;
}

FigurePreset fig3(const std::string& name, int n, Real gamma_l, FigureKind kind, Real t_final, int n_traj) {
  FigurePreset f;
  f.name = name;
  f.title = "pair entropies S_{j,j+1}(t) and total purity";
  f.kind = kind;
  f.curves.push_back({"chain", chain_point(n, gamma_l), {}});
  f.t_final = t_final;
  f.points = 201;
  f.n_traj = n_traj;
  return f;
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig2a", "fig3a", "fig3b", "fig3c", "fig3d",
                                                 "fig4a", "fig4b", "gap_scaling"};
  return names;
}

FigurePreset figure_preset(const std::string& name) {
  FigurePreset f;
  f.name = name;
  if (name == "fig2a") {
    f.title = "gamma_L/gamma_R vs Raman coupling";
    f.kind = FigureKind::RatesSweep;
    f.omega = kFig2Omega;
    f.omega0_grid = linspace(0.01, 2.0, 200);
    auto equal = fig2_reservoir();
    auto zero = fig2_reservoir();
    zero.g_ad = 0.0;
    f.curves.push_back({"gad_equal", {}, equal});
    f.curves.push_back({"gad_zero", {}, zero});
    return f;
  }
  if (name == "fig3a") return fig3(name, 10, 0.0, FigureKind::Trajectories, 200.0, 128);
  if (name == "fig3b") return fig3(name, 10, 0.4, FigureKind::Trajectories, 1000.0, 64);
  if (name == "fig3c") return fig3(name, 9, 0.0, FigureKind::DensityEvolve, 200.0, 0);
  if (name == "fig3d") return fig3(name, 9, 0.4, FigureKind::Trajectories, 1000.0, 64);
  if (name == "fig4a" || name == "fig4b") {
    const bool a = name == "fig4a";
    f.title = a ? "pair purities vs commensurability deviation" : "pair purities vs loss outside the bath";
    f.kind = FigureKind::ImperfectionScan;
    f.axis = a ? chain::Imperfection::Epsilon : chain::Imperfection::GammaPrime;
    f.scan_values = a ? linspace(0.0, 0.5, 26) : linspace(0.0, 0.2, 21);
    for (Real gl : a ? std::vector<Real>{0.1, 0.4} : std::vector<Real>{0.0, 0.4})
      f.curves.push_back({"gl" + std::string(gl == 0.0 ? "0" : gl == 0.1 ? "0.1" : "0.4"), chain_point(6, gl), {}});
    return f;
  }
  if (name == "gap_scaling") {
    f.title = "steady-state time t_ss vs asymmetry and drive";
    f.kind = FigureKind::GapScaling;
    f.gap_sizes = {2, 4, 6};
    f.gap_rabis = {0.5, 1.0};
    f.gap_delta_gammas = {0.2, 0.8};
    f.delta_gamma_grid = logspace(0.05, 1.0, 14);
    f.rabi_grid = logspace(0.1, 10.0, 14);
    return f;
  }
  throw Error(ErrorCode::UnknownFigure, "no figure named '" + name + "'");
}

}  // namespace chiral::lab
