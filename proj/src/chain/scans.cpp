#include "chiral/chain/scans.hpp"

#include <cmath>

#include "chiral/chain/observables.hpp"
#include "chiral/parallel.hpp"

namespace chiral::chain {

std::vector<ImperfectionRow> imperfection_scan(const ChainParams& base, Imperfection kind,
                                               const std::vector<Real>& values, const SpectralOptions& options) {
  if (base.n_spins % 2 != 0)
    throw Error(ErrorCode::OddChain, "imperfection scan needs an even chain, got N=" + std::to_string(base.n_spins));
  std::vector<ImperfectionRow> rows(values.size());
  parallel_for(static_cast<Index>(values.size()), [&](Index i) {
    ImperfectionRow& row = rows[static_cast<std::size_t>(i)];
    row.value = values[static_cast<std::size_t>(i)];
    ChainParams p = base;
    switch (kind) {
      case Imperfection::Epsilon: p.epsilon_comm = row.value; break;
      case Imperfection::GammaPrime: p.gamma_prime = row.value; break;
      case Imperfection::Detuning: p.detuning = row.value; break;
    }
    try {
      const auto ss = steady_state(build_liouvillian(p), options);
      const auto obs = pair_observables(ss.rho);
      row.pair_purities = obs.purities;
      row.pair_entropies = obs.entropies;
      row.purity = obs.purity;
      row.nullspace_dim = ss.nullspace_dim;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

bool purities_decrease_left_to_right(const std::vector<ImperfectionRow>& rows, Real slack) {
  std::vector<Real> mean;
  int count = 0;
  for (const auto& r : rows) {
    if (!r.error.empty() || r.value == 0.0) continue;
    if (mean.empty()) mean.assign(r.pair_purities.size(), 0.0);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += r.pair_purities[j];
    ++count;
  }
  if (count == 0) return true;
  for (std::size_t j = 1; j < mean.size(); ++j)
    if (mean[j] / count > mean[j - 1] / count + slack) return false;
  return true;
}

std::vector<GapRow> gap_scan(const ChainParams& base, GapAxis axis, const std::vector<Real>& values,
                             const SpectralOptions& options) {
  std::vector<GapRow> rows(values.size());
  parallel_for(static_cast<Index>(values.size()), [&](Index i) {
    GapRow& row = rows[static_cast<std::size_t>(i)];
    row.value = values[static_cast<std::size_t>(i)];
    ChainParams p = base;
    if (axis == GapAxis::GammaRatio) p.gamma_l = row.value * base.gamma_r;
    else p.rabi = std::polar(row.value, std::arg(base.rabi));
    try {
      const auto g = liouvillian_gap(build_liouvillian(p), options);
      row.lambda1 = g.lambda1;
      row.t_ss = g.t_ss;
      row.nullspace_dim = g.nullspace_dim;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

PowerLawFit fit_power_law(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "power-law fit needs >= 2 points");
  const Index n = static_cast<Index>(x.size());
  MatrixXr a(n, 2);
  VectorXr b(n);
  for (Index i = 0; i < n; ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw Error(ErrorCode::InvalidArgument, "power-law fit needs positive data");
    a(i, 0) = std::log(x[i]);
    a(i, 1) = 1.0;
    b(i) = std::log(y[i]);
  }
  const VectorXr coef = a.colPivHouseholderQr().solve(b);
  const VectorXr resid = b - a * coef;
  const Real ss_tot = (b.array() - b.mean()).square().sum();
  PowerLawFit fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.r2 = ss_tot > 0.0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
  return fit;
}

}  // namespace chiral::chain
