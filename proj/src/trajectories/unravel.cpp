#include "chiral/trajectories/unravel.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "chiral/chain/liouvillian.hpp"
#include "chiral/chain/operators.hpp"

namespace chiral::trajectories {

namespace {

SparseRowMatrixC hopping(int n, const MatrixXc& coef) {
  // sum_ab coef_ab sigma_a^dag sigma_b
  const Index dim = chain::hilbert_dim(n);
  std::vector<TripletC> t;
  for (Index s = 0; s < dim; ++s)
    for (int b = 0; b < n; ++b) {
      const Index bb = chain::site_mask(n, b);
      if (!(s & bb)) continue;
      for (int a = 0; a < n; ++a) {
        const Complex v = coef(a, b);
        if (v == Complex(0.0)) continue;
        if (a == b) t.emplace_back(s, s, v);
        else if (!(s & chain::site_mask(n, a))) t.emplace_back(s ^ bb ^ chain::site_mask(n, a), s, v);
      }
    }
  SparseRowMatrixC m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Real max_abs(const SparseMatrixC& m) {
  Real r = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

}  // namespace

UnraveledGenerator unravel(const chain::ChainParams& params, const UnravelOptions& options) {
  const chain::Orientation o = chain::orient(params);
  const chain::ChainParams& p = o.built;
  const int n = p.n_spins;
  const Real gl = p.gamma_l, gr = p.gamma_r, dg = p.delta_gamma();

  // Built-frame quantities placed on physical sites.
  VectorXc right(n), left(n);
  MatrixXc coherent = MatrixXc::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const int pa = o.physical_site[a];
    const Real phi_a = a * p.epsilon_comm / 2.0;
    right(pa) = std::sqrt(gr) * std::exp(-kI * phi_a);
    left(pa) = std::sqrt(gl) * std::exp(kI * phi_a);
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const Real phi = (a - b) * p.epsilon_comm / 2.0;
      // bidirectional exchange plus the cascaded coherent term
      Complex v = gl * std::sin(std::abs(phi));
      v += (a < b ? 1.0 : -1.0) * kI * (dg / 2.0) * std::exp(kI * phi);
      coherent(pa, o.physical_site[b]) = v;
    }
  }

  UnraveledGenerator g;
  g.params = params;
  g.n_spins = n;
  const Index dim = chain::hilbert_dim(n);

  SparseRowMatrixC h_sys(dim, dim);
  {
    MatrixXc det = MatrixXc::Zero(n, n);
    for (int a = 0; a < n; ++a) det(a, a) = -p.detuning;
    h_sys = hopping(n, det);
    for (int a = 0; a < n; ++a) {
      const Complex om = p.site_rabi(a);
      const SparseRowMatrixC s = chain::lowering(n, o.physical_site[a]);
      h_sys += om * s + std::conj(om) * SparseRowMatrixC(s.adjoint());
    }
  }
  g.hamiltonian = h_sys + hopping(n, coherent);
  g.hamiltonian.prune(Complex(0.0));

  if (gr > 0.0) {
    g.jumps.push_back(chain::collective_lowering(n, right));
    g.channel_names.push_back("right");
  }
  if (gl > 0.0) {
    g.jumps.push_back(chain::collective_lowering(n, left));
    g.channel_names.push_back("left");
  }
  if (p.gamma_prime > 0.0)
    for (int j = 0; j < n; ++j) {
      g.jumps.push_back(std::sqrt(p.gamma_prime) * chain::lowering(n, j));
      g.channel_names.push_back("local_" + std::to_string(j + 1));
    }

  SparseRowMatrixC loss(dim, dim);
  for (const auto& c : g.jumps) loss += SparseRowMatrixC(c.adjoint() * c);
  g.h_eff = g.hamiltonian - Complex(0.0, 0.5) * loss;
  g.h_eff.makeCompressed();

  if (n <= options.check_max_spins) {
    const SparseMatrixC diff =
        reconstruct_liouvillian(g) - chain::build_liouvillian(params).to_sparse();
    g.equivalence_residual = max_abs(diff);
    if (!(g.equivalence_residual < options.check_tol)) {
      std::ostringstream os;
      os << "unraveled generator differs from the master equation by " << g.equivalence_residual << " (max norm)";
      throw Error(ErrorCode::EquivalenceCheckFailed, os.str());
    }
  }
  return g;
}

SparseMatrixC reconstruct_liouvillian(const UnraveledGenerator& g) {
  const Index dim = g.hilbert_dim();
  SparseMatrixC id(dim, dim);
  id.setIdentity();
  const SparseMatrixC h(g.h_eff);
  const SparseMatrixC h_conj = h.conjugate();
  // vec(A rho B) = (B^T kron A) vec(rho)
  SparseMatrixC l = SparseMatrixC(Eigen::kroneckerProduct(id, SparseMatrixC(-kI * h))) +
                    SparseMatrixC(Eigen::kroneckerProduct(SparseMatrixC(kI * h_conj), id));
  for (const auto& c : g.jumps) {
    const SparseMatrixC cc(c);
    l += SparseMatrixC(Eigen::kroneckerProduct(SparseMatrixC(cc.conjugate()), cc));
  }
  l.prune(Complex(0.0));
  return l;
}

Real dissipator_defect(const UnraveledGenerator& g) {
  SparseMatrixC defect = SparseMatrixC(kI * (SparseMatrixC(g.h_eff) - SparseMatrixC(g.h_eff.adjoint())));
  for (const auto& c : g.jumps) defect -= SparseMatrixC(c.adjoint() * c);
  return max_abs(defect);
}

}  // namespace chiral::trajectories
