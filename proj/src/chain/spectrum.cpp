#include "chiral/chain/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "chiral/chain/operators.hpp"
#include "chiral/linalg/krylov.hpp"

namespace chiral::chain {

namespace {

linalg::EigenPairs slow_modes(const Superoperator& l, const SpectralOptions& opt, bool vectors) {
  const int n = l.n_spins();
  if (n <= opt.dense_max_spins) return linalg::dense_eigs(l.to_dense(), vectors);
  if (n <= opt.krylov_max_spins) {
    linalg::ShiftInvertOptions so;
    so.shift = Complex(opt.krylov_shift * l.rate_scale(), 0.0);
    so.nev = opt.krylov_nev;
    so.block_size = opt.krylov_block;
    so.tol = opt.krylov_tol;
    auto pairs = linalg::shift_invert_eigs(l.to_sparse(), so);
    if (pairs.converged < std::min<int>(opt.krylov_nev, static_cast<int>(pairs.values.size())))
      throw Error(ErrorCode::SolverDivergence, "Krylov eigensolver converged " + std::to_string(pairs.converged) +
                                                   " of " + std::to_string(opt.krylov_nev) + " eigenpairs");
    return pairs;
  }
  throw Error(ErrorCode::DimensionOverflow,
              "eigen-decomposition limited to N <= " + std::to_string(opt.krylov_max_spins));
}

DensityMatrix normalize_state(const VectorXc& v, Index hdim) {
  DensityMatrix rho = unvectorize(v, hdim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-300) throw Error(ErrorCode::SolverDivergence, "stationary vector has zero trace");
  rho /= tr.real();
  return rho;
}

}  // namespace

VectorXc slow_eigenvalues(const Superoperator& l, const SpectralOptions& options) {
  auto pairs = slow_modes(l, options, false);
  std::vector<Complex> v(pairs.values.data(), pairs.values.data() + pairs.values.size());
  std::stable_sort(v.begin(), v.end(), [](Complex a, Complex b) { return a.real() > b.real(); });
  return Eigen::Map<VectorXc>(v.data(), static_cast<Index>(v.size()));
}

SteadyState steady_state(const Superoperator& l, const SpectralOptions& opt) {
  const Real thr = opt.null_threshold * l.rate_scale();
  SteadyState out;
  RowMatrixXc lr(l.hilbert_dim(), l.hilbert_dim());

  if (l.n_spins() <= opt.krylov_max_spins) {
    const auto pairs = slow_modes(l, opt, true);
    int first = -1;
    for (Index i = 0; i < pairs.values.size(); ++i) {
      if (std::abs(pairs.values(i)) < thr) {
        if (first < 0) first = static_cast<int>(i);
        ++out.nullspace_dim;
      }
    }
    if (first < 0) throw Error(ErrorCode::SolverDivergence, "no stationary eigenvector below threshold");
    out.method = l.n_spins() <= opt.dense_max_spins ? "dense" : "krylov";
    if (out.nullspace_dim == 1) {
      out.rho = normalize_state(pairs.vectors.col(first), l.hilbert_dim());
    } else {
      // Degenerate manifold: return a trace-normalizable member.
      int pick = first;
      for (Index i = 0; i < pairs.values.size(); ++i)
        if (std::abs(pairs.values(i)) < thr &&
            std::abs(unvectorize(pairs.vectors.col(i), l.hilbert_dim()).trace()) > 1e-8) {
          pick = static_cast<int>(i);
          break;
        }
      out.rho = normalize_state(pairs.vectors.col(pick), l.hilbert_dim());
    }
    l.apply(out.rho, lr);
    out.residual = lr.cwiseAbs().maxCoeff();
    return out;
  }

  // Long-time evolution from the ground state.
  EvolveOptions eo;
  eo.validate = false;
  DensityMatrix rho = pure_density(ground_state(l.n_spins()));
  Real t = 0.0;
  bool done = false;
  while (!done && t < opt.relax_t_max) {
    const Real t_next = std::min(t + opt.relax_interval, opt.relax_t_max);
    evolve(l, rho, {t_next - t}, [&](Real, const DensityMatrix& r) { rho = r; }, eo);
    t = t_next;
    l.apply_hermitian(rho, lr);
    out.residual = lr.cwiseAbs().maxCoeff();
    done = out.residual < opt.relax_tol * l.rate_scale();
  }
  if (!done) throw Error(ErrorCode::SolverDivergence, "evolution did not relax within t_max");
  out.rho = rho / rho.trace().real();
  out.nullspace_dim = 1;
  out.method = "evolution";
  return out;
}

LiouvillianGap liouvillian_gap(const Superoperator& l, const SpectralOptions& opt) {
  const Real thr = opt.null_threshold * l.rate_scale();
  const auto pairs = slow_modes(l, opt, false);
  LiouvillianGap g;
  g.method = l.n_spins() <= opt.dense_max_spins ? "dense" : "krylov";
  bool found = false;
  for (Index i = 0; i < pairs.values.size(); ++i) {
    const Complex v = pairs.values(i);
    if (std::abs(v) < thr) {
      ++g.nullspace_dim;
      continue;
    }
    if (!found || v.real() > g.lambda1.real()) {
      g.lambda1 = v;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::SolverDivergence, "no nonzero eigenvalue resolved");
  g.degenerate = g.nullspace_dim > 1;
  g.t_ss = -1.0 / g.lambda1.real();
  return g;
}

}  // namespace chiral::chain
