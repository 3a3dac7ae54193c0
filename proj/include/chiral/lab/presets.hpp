#pragma once

#include <string>
#include <vector>

#include "chiral/chain/params.hpp"
#include "chiral/chain/scans.hpp"
#include "chiral/reservoir/plane_wave.hpp"

namespace chiral::lab {

enum class FigureKind { RatesSweep, Trajectories, DensityEvolve, ImperfectionScan, GapScaling };

/// One curve of a figure: a label and the chain or reservoir parameters it uses.
struct Curve {
  std::string label;
  chain::ChainParams chain;
  reservoir::ReservoirParams reservoir;
};

/// Built-in figure parameters. Every preset is frozen data.
struct FigurePreset {
  std::string name;
  std::string title;
  FigureKind kind = FigureKind::RatesSweep;
  std::vector<Curve> curves;

  // rates sweep
  Real omega = 0.0;
  std::vector<Real> omega0_grid;

  // time evolution (state starts in |g...g>)
  Real t_final = 0.0;
  int points = 0;
  int n_traj = 0;

  // imperfection scans
  chain::Imperfection axis = chain::Imperfection::Epsilon;
  std::vector<Real> scan_values;

  // gap scaling: t_ss vs delta_gamma at fixed rabi, and vs rabi at fixed delta_gamma
  std::vector<int> gap_sizes;
  std::vector<Real> gap_rabis;          // curves of panel (a)
  std::vector<Real> gap_delta_gammas;   // curves of panel (b)
  std::vector<Real> delta_gamma_grid;
  std::vector<Real> rabi_grid;
};

/// fig2a fig3a fig3b fig3c fig3d fig4a fig4b gap_scaling
const std::vector<std::string>& figure_names();
/// Throws UnknownFigure.
FigurePreset figure_preset(const std::string& name);

/// Reservoir parameters shared by the asymmetry figures.
reservoir::ReservoirParams fig2_reservoir();
inline constexpr Real kFig2Omega = 1.46;

std::vector<Real> linspace(Real a, Real b, int n);
std::vector<Real> logspace(Real a, Real b, int n);

}  // namespace chiral::lab
