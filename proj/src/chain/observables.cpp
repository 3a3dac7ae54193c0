#include "chiral/chain/observables.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "chiral/chain/operators.hpp"

namespace chiral::chain {

namespace {

int chain_length(const DensityMatrix& rho) {
  const Index dim = rho.rows();
  if (dim != rho.cols() || dim < 2 || (dim & (dim - 1)))
    throw Error(ErrorCode::InvalidArgument, "density matrix dimension is not a power of two");
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  return n;
}

void check_index(int n, int j) {
  if (j < 0 || j >= n)
    throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(j) + " outside chain of " + std::to_string(n));
}

}  // namespace

DimerProduct dimer_product(int n_spins, Complex alpha) {
  if (n_spins % 2 != 0) throw Error(ErrorCode::OddChain, "dimer product needs an even chain, got N=" +
                                                             std::to_string(n_spins));
  DimerProduct d;
  d.n_pairs = n_spins / 2;
  d.alpha = alpha;
  const Real norm = std::sqrt(1.0 + std::norm(alpha));
  d.pair_state = VectorXc::Zero(4);
  d.pair_state(0) = 1.0 / norm;                      // |gg>
  d.pair_state(1) = alpha / std::sqrt(2.0) / norm;   // |ge>
  d.pair_state(2) = -alpha / std::sqrt(2.0) / norm;  // |eg>
  d.state = VectorXc::Ones(1);
  for (int p = 0; p < d.n_pairs; ++p) {
    VectorXc next(d.state.size() * 4);
    for (Index i = 0; i < d.state.size(); ++i) next.segment(4 * i, 4) = d.state(i) * d.pair_state;
    d.state.swap(next);
  }
  return d;
}

DimerProduct dimer_product(const ChainParams& params) {
  validate(params);
  if (params.n_spins % 2 != 0)
    throw Error(ErrorCode::OddChain, "dimer product needs an even chain, got N=" + std::to_string(params.n_spins));
  const Real dg = params.delta_gamma();
  if (dg == 0.0) throw Error(ErrorCode::ZeroAsymmetry, "dimer singlet fraction diverges at gamma_l == gamma_r");
  const Complex alpha = 2.0 * kI * std::sqrt(2.0) * std::conj(params.rabi) / dg;
  return dimer_product(params.n_spins, alpha);
}

MatrixXc reduced_pair(const DensityMatrix& rho, int j, int l) {
  const int n = chain_length(rho);
  check_index(n, j);
  check_index(n, l);
  if (j == l) throw Error(ErrorCode::IndexOutOfRange, "pair indices must differ");
  const Index bj = site_mask(n, j), bl = site_mask(n, l);
  const Index dim = rho.rows();
  auto embed = [&](Index rest, int a) { return rest | ((a & 2) ? bj : 0) | ((a & 1) ? bl : 0); };
  MatrixXc out = MatrixXc::Zero(4, 4);
  for (Index rest = 0; rest < dim; ++rest) {
    if (rest & (bj | bl)) continue;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out(a, b) += rho(embed(rest, a), embed(rest, b));
  }
  return out;
}

MatrixXc reduced_site(const DensityMatrix& rho, int j) {
  const int n = chain_length(rho);
  check_index(n, j);
  const Index bj = site_mask(n, j);
  MatrixXc out = MatrixXc::Zero(2, 2);
  for (Index rest = 0; rest < rho.rows(); ++rest) {
    if (rest & bj) continue;
    out(0, 0) += rho(rest, rest);
    out(0, 1) += rho(rest, rest | bj);
    out(1, 0) += rho(rest | bj, rest);
    out(1, 1) += rho(rest | bj, rest | bj);
  }
  return out;
}

Real entropy(const MatrixXc& rho) {
  const MatrixXc h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  Real s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real p = es.eigenvalues()(i);
    if (p > kEntropyFloor) s -= p * std::log(p);
  }
  return std::max(s, 0.0);  // eigenvalues slightly above 1 give -0
}

Real purity(const MatrixXc& rho) { return (rho.array() * rho.transpose().array()).sum().real(); }

Real purity(const DensityMatrix& rho) { return (rho.array() * rho.transpose().array()).sum().real(); }

Real fidelity(const DensityMatrix& rho, const VectorXc& psi) {
  if (psi.size() != rho.rows()) throw Error(ErrorCode::InvalidArgument, "state dimension mismatch");
  return psi.dot(rho * psi).real();
}

PairObservables pair_observables(const DensityMatrix& rho) {
  const int n = chain_length(rho);
  PairObservables out;
  for (int j = 0; j + 1 < n; j += 2) {
    MatrixXc p = reduced_pair(rho, j, j + 1);
    out.entropies.push_back(entropy(p));
    out.purities.push_back(purity(p));
    out.pairs.push_back(std::move(p));
  }
  out.purity = purity(rho);
  return out;
}

}  // namespace chiral::chain
