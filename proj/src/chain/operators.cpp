#include "chiral/chain/operators.hpp"

#include <bit>

namespace chiral::chain {

namespace {

void check_site(int n_spins, int site) {
  if (site < 0 || site >= n_spins)
    throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(site) + " outside chain of " +
                                                std::to_string(n_spins));
}

SparseRowMatrixC from_triplets(Index dim, const std::vector<TripletC>& t) {
  SparseRowMatrixC m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseRowMatrixC lowering(int n_spins, int site) {
  check_site(n_spins, site);
  VectorXc c = VectorXc::Zero(n_spins);
  c(site) = 1.0;
  return collective_lowering(n_spins, c);
}

SparseRowMatrixC collective_lowering(int n_spins, const VectorXc& coeffs) {
  const Index dim = hilbert_dim(n_spins);
  std::vector<TripletC> t;
  for (Index s = 0; s < dim; ++s)
    for (int j = 0; j < n_spins; ++j) {
      const Index bit = site_mask(n_spins, j);
      if ((s & bit) && coeffs(j) != Complex(0.0)) t.emplace_back(s ^ bit, s, coeffs(j));
    }
  return from_triplets(dim, t);
}

SparseRowMatrixC excitation(int n_spins, int site) {
  check_site(n_spins, site);
  const Index dim = hilbert_dim(n_spins);
  const Index bit = site_mask(n_spins, site);
  std::vector<TripletC> t;
  for (Index s = 0; s < dim; ++s)
    if (s & bit) t.emplace_back(s, s, 1.0);
  return from_triplets(dim, t);
}

SparseRowMatrixC pauli_x(int n_spins, int site) {
  const SparseRowMatrixC s = lowering(n_spins, site);
  return SparseRowMatrixC(s + SparseRowMatrixC(s.adjoint()));
}

SparseRowMatrixC pauli_y(int n_spins, int site) {
  const SparseRowMatrixC s = lowering(n_spins, site);
  return SparseRowMatrixC(kI * (s - SparseRowMatrixC(s.adjoint())));
}

SparseRowMatrixC total_excitation(int n_spins) {
  const Index dim = hilbert_dim(n_spins);
  std::vector<TripletC> t;
  for (Index s = 0; s < dim; ++s) {
    const int pop = std::popcount(static_cast<unsigned long long>(s));
    if (pop) t.emplace_back(s, s, static_cast<Real>(pop));
  }
  return from_triplets(dim, t);
}

VectorXc ground_state(int n_spins) {
  VectorXc psi = VectorXc::Zero(hilbert_dim(n_spins));
  psi(0) = 1.0;
  return psi;
}

}  // namespace chiral::chain
