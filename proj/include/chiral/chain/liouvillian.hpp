#pragma once

#include <vector>

#include "chiral/chain/params.hpp"

namespace chiral::chain {

struct LiouvillianOptions {
  int sparse_max_spins = 12;
  int dense_max_spins = 7;
};

/// The master-equation generator on density matrices of an N-spin chain.
///
/// Acts matrix-free as L(rho) = K rho + rho K^dag + sum_m w_m c_m rho c_m^dag,
/// where the jump operators c_m come from the eigendecomposition of the
/// coefficient matrix c_jl. Materialized forms act on column-stacked
/// vec(rho), vec(A rho B) = (B^T kron A) vec(rho).
class Superoperator {
 public:
  Superoperator(ChainParams params, LiouvillianOptions options = {});

  const ChainParams& params() const { return params_; }
  const ChainCoefficients& coefficients() const { return coef_; }
  int n_spins() const { return params_.n_spins; }
  bool mirrored() const { return coef_.mirrored; }
  Index hilbert_dim() const { return hdim_; }
  Index dim() const { return hdim_ * hdim_; }

  /// K = -i H_sys + sum_ab m_ab sigma_a^dag sigma_b.
  const SparseRowMatrixC& k_operator() const { return k_; }
  const SparseRowMatrixC& hamiltonian() const { return h_; }
  const std::vector<SparseRowMatrixC>& jump_operators() const { return jumps_; }
  const VectorXr& jump_weights() const { return weights_; }

  /// out = L(rho) for any square rho.
  void apply(const RowMatrixXc& rho, RowMatrixXc& out) const;
  /// out = L(rho) assuming rho is Hermitian; the result is exactly Hermitian.
  void apply_hermitian(const RowMatrixXc& rho, RowMatrixXc& out) const;
  /// out = L^dag(x) (Heisenberg picture).
  void apply_adjoint(const RowMatrixXc& x, RowMatrixXc& out) const;

  /// Sparse 4^N x 4^N matrix assembled directly from the coefficients.
  SparseMatrixC to_sparse() const;
  /// Dense form; throws DimensionOverflow above the dense cap.
  MatrixXc to_dense() const;

  /// Rate scale used by spectral thresholds (the larger chiral rate).
  Real rate_scale() const;

 private:
  ChainParams params_;
  LiouvillianOptions options_;
  ChainCoefficients coef_;
  Index hdim_ = 0;
  SparseRowMatrixC h_;
  SparseRowMatrixC k_;
  std::vector<SparseRowMatrixC> jumps_;
  VectorXr weights_;
};

Superoperator build_liouvillian(const ChainParams& params, const LiouvillianOptions& options = {});

/// Column-stacked vec(rho) <-> rho.
VectorXc vectorize(const RowMatrixXc& rho);
RowMatrixXc unvectorize(const VectorXc& v, Index hilbert_dim);

}  // namespace chiral::chain
