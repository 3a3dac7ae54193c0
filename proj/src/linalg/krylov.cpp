#include "chiral/linalg/krylov.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace chiral::linalg {

namespace {

// Orthogonalizes column `k` of `basis` against columns [0, k) twice
// (classical Gram-Schmidt with one reorthogonalization). Returns the norm
// left after projection.
Real orthogonalize(MatrixXc& basis, Index k) {
  auto w = basis.col(k);
  for (int pass = 0; pass < 2; ++pass) {
    if (k == 0) break;
    const VectorXc h = basis.leftCols(k).adjoint() * w;
    w.noalias() -= basis.leftCols(k) * h;
  }
  return w.norm();
}

std::vector<Index> order_by_magnitude(const VectorXc& theta) {
  std::vector<Index> idx(theta.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return std::abs(theta(a)) > std::abs(theta(b)); });
  return idx;
}

}  // namespace

EigenPairs shift_invert_eigs(const SparseMatrixC& a, const ShiftInvertOptions& opt) {
  const Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorCode::InvalidArgument, "shift_invert_eigs needs a square matrix");
  const int nev = std::min<int>(opt.nev, static_cast<int>(n));
  const Index max_basis = std::min<Index>(std::max(opt.max_basis, nev + opt.block_size), n);

  SparseMatrixC shifted = a;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= opt.shift;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::SolverDivergence, "sparse LU of the shifted operator failed: " + lu.lastErrorMessage());

  MatrixXc basis(n, max_basis);  // orthonormal Krylov basis V
  MatrixXc image(n, max_basis);  // (A - shift)^-1 V, column by column
  Index filled = 0;               // columns of V in use
  Index mapped = 0;               // columns of image computed

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<Real> gauss;
  const Index block = std::min<Index>(opt.block_size, max_basis);
  for (Index k = 0; k < block; ++k) {
    for (Index i = 0; i < n; ++i) basis(i, k) = Complex(gauss(rng), gauss(rng));
    const Real nrm = orthogonalize(basis, k);
    basis.col(k) /= nrm;
    ++filled;
  }

  auto map_column = [&](Index j) {
    image.col(j) = lu.solve(basis.col(j));
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::SolverDivergence, "sparse LU solve failed");
  };

  MatrixXc projected(max_basis, max_basis);  // V^dag (A - shift)^-1 V, filled incrementally
  Index projected_size = 0;
  Index next_check = std::min<Index>(max_basis, std::max<Index>(2 * nev + block, opt.check_interval));

  EigenPairs out;
  while (true) {
    // Extend the basis: new vector = (A - shift)^-1 v_{filled - block}.
    const Index target = next_check;
    while (filled < target) {
      const Index src = filled - block;
      if (mapped <= src) {
        map_column(src);
        mapped = src + 1;
      }
      basis.col(filled) = image.col(src);
      const Real before = basis.col(filled).norm();
      const Real nrm = orthogonalize(basis, filled);
      if (nrm <= 1e-13 * before) {
        // Invariant subspace (or breakdown): replace with a fresh random direction.
        for (Index i = 0; i < n; ++i) basis(i, filled) = Complex(gauss(rng), gauss(rng));
        const Real fresh = orthogonalize(basis, filled);
        basis.col(filled) /= fresh;
      } else {
        basis.col(filled) /= nrm;
      }
      ++filled;
    }
    while (mapped < filled) map_column(mapped++);

    const Index m = filled;
    const Index p0 = projected_size;
    projected.block(0, p0, m, m - p0).noalias() = basis.leftCols(m).adjoint() * image.middleCols(p0, m - p0);
    projected.block(p0, 0, m - p0, p0).noalias() = basis.middleCols(p0, m - p0).adjoint() * image.leftCols(p0);
    projected_size = m;
    Eigen::ComplexEigenSolver<MatrixXc> ces(projected.topLeftCorner(m, m), true);
    if (ces.info() != Eigen::Success) throw Error(ErrorCode::SolverDivergence, "Ritz eigenproblem failed");
    const auto order = order_by_magnitude(ces.eigenvalues());

    const int take = std::min<int>(nev, static_cast<int>(m));
    out.values.resize(take);
    out.vectors.resize(n, take);
    out.residuals.resize(take);
    out.converged = 0;
    bool prefix = true;
    for (int i = 0; i < take; ++i) {
      const Index c = order[i];
      const Complex theta = ces.eigenvalues()(c);
      VectorXc y = ces.eigenvectors().col(c);
      y.normalize();
      VectorXc x = basis.leftCols(m) * y;
      const Real res = (image.leftCols(m) * y - theta * x).norm() / std::max(std::abs(theta), 1e-300);
      out.values(i) = opt.shift + 1.0 / theta;
      out.vectors.col(i) = x / x.norm();
      out.residuals(i) = res;
      if (prefix && res <= opt.tol) ++out.converged;
      else prefix = false;
    }
    if (out.converged >= take || m >= max_basis) break;
    next_check = std::min<Index>(max_basis, std::max<Index>(m + opt.check_interval, m + m / 3));
  }
  return out;
}

EigenPairs dense_eigs(const MatrixXc& a, bool with_vectors) {
  Eigen::ComplexEigenSolver<MatrixXc> ces(a, with_vectors);
  if (ces.info() != Eigen::Success) throw Error(ErrorCode::SolverDivergence, "dense eigensolver did not converge");
  const Index n = a.rows();
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index x, Index y) { return ces.eigenvalues()(x).real() > ces.eigenvalues()(y).real(); });
  EigenPairs out;
  out.values.resize(n);
  out.residuals = VectorXr::Zero(n);
  if (with_vectors) out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values(i) = ces.eigenvalues()(idx[i]);
    if (with_vectors) out.vectors.col(i) = ces.eigenvectors().col(idx[i]).normalized();
  }
  out.converged = static_cast<int>(n);
  return out;
}

}  // namespace chiral::linalg
