#pragma once

#include <string>
#include <vector>

#include "chiral/chain/spectrum.hpp"

namespace chiral::chain {

enum class Imperfection { Epsilon, GammaPrime, Detuning };

struct ImperfectionRow {
  Real value = 0.0;
  std::vector<Real> pair_purities;   // P_{2j-1,2j}
  std::vector<Real> pair_entropies;  // S_{2j-1,2j}
  Real purity = 0.0;
  int nullspace_dim = 0;
  std::string error;  // non-empty when the point failed
};

/// Steady-state pair observables while one imperfection parameter is varied.
std::vector<ImperfectionRow> imperfection_scan(const ChainParams& base, Imperfection kind,
                                               const std::vector<Real>& values, const SpectralOptions& options = {});

/// True if pair purities do not increase from left to right beyond `slack`
/// on average over the rows with a non-zero imperfection.
bool purities_decrease_left_to_right(const std::vector<ImperfectionRow>& rows, Real slack = 1e-6);

enum class GapAxis { GammaRatio, Rabi };

struct GapRow {
  Real value = 0.0;
  Complex lambda1{0.0, 0.0};
  Real t_ss = 0.0;
  int nullspace_dim = 0;
  std::string error;
};

/// Liouvillian gap while gamma_l / gamma_r (gamma_r fixed) or |Omega| is varied.
std::vector<GapRow> gap_scan(const ChainParams& base, GapAxis axis, const std::vector<Real>& values,
                             const SpectralOptions& options = {});

struct PowerLawFit {
  Real slope = 0.0;
  Real intercept = 0.0;
  Real r2 = 0.0;
};

/// Least-squares fit of log y = slope * log x + intercept.
PowerLawFit fit_power_law(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace chiral::chain
