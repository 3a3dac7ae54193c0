#include "chiral/chain/liouvillian.hpp"

#include <algorithm>
#include <bit>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "chiral/chain/operators.hpp"

namespace chiral::chain {

namespace {

// Sparse matrix of sum_ab coef_ab sigma_a^dag sigma_b plus a diagonal shift
// per excitation; the building block of K.
void add_hopping(int n, const MatrixXc& coef, std::vector<TripletC>& t) {
  const Index dim = hilbert_dim(n);
  for (Index s = 0; s < dim; ++s) {
    for (int b = 0; b < n; ++b) {
      const Index bb = site_mask(n, b);
      if (!(s & bb)) continue;
      for (int a = 0; a < n; ++a) {
        const Complex v = coef(a, b);
        if (v == Complex(0.0)) continue;
        if (a == b) {
          t.emplace_back(s, s, v);
        } else {
          const Index ba = site_mask(n, a);
          if (s & ba) continue;
          t.emplace_back(s ^ bb ^ ba, s, v);
        }
      }
    }
  }
}

// out (+)= alpha * a * b for CSR a and row-major dense b. Columns are
// processed in strips so the rows of b referenced by a stay cache resident.
void csr_times_dense(const SparseRowMatrixC& a, const RowMatrixXc& b, RowMatrixXc& out, Complex alpha,
                     bool accumulate) {
  constexpr Index kStrip = 64;
  const Index rows = a.rows(), cols = b.cols();
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const Complex* val = a.valuePtr();
  const Real* bd = reinterpret_cast<const Real*>(b.data());
  Real* od = reinterpret_cast<Real*>(out.data());
  alignas(64) Real acc[2 * kStrip];
  for (Index c0 = 0; c0 < cols; c0 += kStrip) {
    const Index w = std::min(kStrip, cols - c0);
    for (Index i = 0; i < rows; ++i) {
      std::fill(acc, acc + 2 * w, 0.0);
      for (auto p = outer[i]; p < outer[i + 1]; ++p) {
        const Complex v = alpha * val[p];
        const Real vr = v.real(), vi = v.imag();
        const Real* src = bd + 2 * (inner[p] * cols + c0);
        for (Index c = 0; c < w; ++c) {
          const Real br = src[2 * c], bi = src[2 * c + 1];
          acc[2 * c] += vr * br - vi * bi;
          acc[2 * c + 1] += vr * bi + vi * br;
        }
      }
      Real* dst = od + 2 * (i * cols + c0);
      if (accumulate)
        for (Index c = 0; c < 2 * w; ++c) dst[c] += acc[c];
      else
        std::copy(acc, acc + 2 * w, dst);
    }
  }
}

// out = a^dag, tiled.
void transpose_conj(const RowMatrixXc& a, RowMatrixXc& out) {
  constexpr Index kTile = 32;
  const Index n = a.rows();
  out.resize(a.cols(), n);
  for (Index r0 = 0; r0 < n; r0 += kTile)
    for (Index c0 = 0; c0 < a.cols(); c0 += kTile) {
      const Index h = std::min(kTile, n - r0), w = std::min(kTile, a.cols() - c0);
      for (Index r = r0; r < r0 + h; ++r)
        for (Index c = c0; c < c0 + w; ++c) out(c, r) = std::conj(a(r, c));
    }
}

}  // namespace

Superoperator::Superoperator(ChainParams params, LiouvillianOptions options)
    : params_(std::move(params)), options_(options) {
  if (params_.n_spins > options_.sparse_max_spins)
    throw Error(ErrorCode::DimensionOverflow, "N=" + std::to_string(params_.n_spins) + " exceeds the sparse cap of " +
                                                  std::to_string(options_.sparse_max_spins) + " spins");
  coef_ = chain_coefficients(params_);
  const int n = params_.n_spins;
  hdim_ = chain::hilbert_dim(n);

  // H_sys = -delta sum sigma^dag sigma + sum (Omega_j sigma_j + h.c.)
  std::vector<TripletC> th;
  for (Index s = 0; s < hdim_; ++s) {
    const int pop = std::popcount(static_cast<unsigned long long>(s));
    if (pop && coef_.detuning != 0.0) th.emplace_back(s, s, -coef_.detuning * pop);
    for (int j = 0; j < n; ++j) {
      const Index bit = site_mask(n, j);
      const Complex om = coef_.drive(j);
      if (om == Complex(0.0)) continue;
      if (s & bit) th.emplace_back(s ^ bit, s, om);
      else th.emplace_back(s | bit, s, std::conj(om));
    }
  }
  h_.resize(hdim_, hdim_);
  h_.setFromTriplets(th.begin(), th.end());
  h_.makeCompressed();

  std::vector<TripletC> tk;
  add_hopping(n, coef_.m, tk);
  k_.resize(hdim_, hdim_);
  k_.setFromTriplets(tk.begin(), tk.end());
  k_ = SparseRowMatrixC(k_ - kI * h_);
  k_.prune(Complex(0.0), 0.0);
  k_.makeCompressed();

  // c = U diag(w) U^dag  ->  c_m = sum_j U_jm sigma_j
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(coef_.c);
  const Real wmax = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  std::vector<Real> w;
  for (Index m = 0; m < n; ++m) {
    const Real wm = es.eigenvalues()(m);
    if (std::abs(wm) <= 1e-13 * wmax || wm == 0.0) continue;
    jumps_.push_back(collective_lowering(n, es.eigenvectors().col(m)));
    w.push_back(wm);
  }
  weights_ = Eigen::Map<VectorXr>(w.data(), static_cast<Index>(w.size()));
}

Real Superoperator::rate_scale() const {
  const Real s = std::max(params_.gamma_l, params_.gamma_r);
  return s > 0.0 ? s : 1.0;
}

void Superoperator::apply(const RowMatrixXc& rho, RowMatrixXc& out) const {
  out.noalias() = k_ * rho;
  out.noalias() += rho * k_.adjoint();
  RowMatrixXc tmp(hdim_, hdim_);
  for (std::size_t m = 0; m < jumps_.size(); ++m) {
    tmp.noalias() = rho * jumps_[m].adjoint();
    out.noalias() += weights_(m) * (jumps_[m] * tmp);
  }
}

void Superoperator::apply_hermitian(const RowMatrixXc& rho, RowMatrixXc& out) const {
  // X = K rho + 1/2 sum w c rho c^dag, L(rho) = X + X^dag; c rho c^dag = c (c rho)^dag.
  thread_local RowMatrixXc x, t1, t2;
  x.resize(hdim_, hdim_);
  csr_times_dense(k_, rho, x, Complex(1.0), false);
  for (std::size_t m = 0; m < jumps_.size(); ++m) {
    t1.resize(hdim_, hdim_);
    csr_times_dense(jumps_[m], rho, t1, Complex(1.0), false);
    transpose_conj(t1, t2);
    csr_times_dense(jumps_[m], t2, x, Complex(0.5 * weights_(m)), true);
  }
  out.resize(hdim_, hdim_);
  transpose_conj(x, out);
  out += x;
}

void Superoperator::apply_adjoint(const RowMatrixXc& x, RowMatrixXc& out) const {
  out.noalias() = k_.adjoint() * x;
  out.noalias() += x * k_;
  RowMatrixXc tmp(hdim_, hdim_);
  for (std::size_t m = 0; m < jumps_.size(); ++m) {
    tmp.noalias() = x * jumps_[m];
    out.noalias() += weights_(m) * (jumps_[m].adjoint() * tmp);
  }
}

SparseMatrixC Superoperator::to_sparse() const {
  const int n = params_.n_spins;
  const SparseMatrixC eye = [&] {
    SparseMatrixC e(hdim_, hdim_);
    e.setIdentity();
    return e;
  }();
  const SparseMatrixC k(k_);
  const SparseMatrixC kc = k.conjugate();
  SparseMatrixC l = Eigen::kroneckerProduct(eye, k);
  l += SparseMatrixC(Eigen::kroneckerProduct(kc, eye));
  std::vector<SparseMatrixC> sig;
  for (int j = 0; j < n; ++j) sig.emplace_back(lowering(n, j));
  // sigma_j rho sigma_l^dag -> (conj(sigma_l) kron sigma_j); sigma is real.
  for (int j = 0; j < n; ++j)
    for (int l2 = 0; l2 < n; ++l2) {
      const Complex c = coef_.c(j, l2);
      if (c == Complex(0.0)) continue;
      l += c * SparseMatrixC(Eigen::kroneckerProduct(sig[l2], sig[j]));
    }
  l.prune(Complex(0.0), 0.0);
  l.makeCompressed();
  return l;
}

MatrixXc Superoperator::to_dense() const {
  if (params_.n_spins > options_.dense_max_spins)
    throw Error(ErrorCode::DimensionOverflow, "N=" + std::to_string(params_.n_spins) + " exceeds the dense cap of " +
                                                  std::to_string(options_.dense_max_spins) + " spins");
  return MatrixXc(to_sparse());
}

Superoperator build_liouvillian(const ChainParams& params, const LiouvillianOptions& options) {
  return Superoperator(params, options);
}

VectorXc vectorize(const RowMatrixXc& rho) {
  VectorXc v(rho.size());
  Eigen::Map<MatrixXc>(v.data(), rho.rows(), rho.cols()) = rho;
  return v;
}

RowMatrixXc unvectorize(const VectorXc& v, Index hilbert_dim) {
  if (v.size() != hilbert_dim * hilbert_dim) throw Error(ErrorCode::InvalidArgument, "vector size mismatch");
  return Eigen::Map<const MatrixXc>(v.data(), hilbert_dim, hilbert_dim);
}

}  // namespace chiral::chain
