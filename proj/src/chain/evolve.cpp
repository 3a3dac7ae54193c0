#include "chiral/chain/evolve.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "chiral/linalg/dopri5.hpp"

namespace chiral::chain {

void check_density_matrix(const DensityMatrix& rho, const DensityChecks& checks) {
  if (rho.rows() != rho.cols()) throw Error(ErrorCode::InvalidState, "density matrix is not square");
  if (!rho.allFinite()) throw Error(ErrorCode::InvalidState, "density matrix has non-finite entries");
  const Real herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > checks.hermitian_tol) {
    std::ostringstream os;
    os << "Hermiticity violated by " << herm;
    throw Error(ErrorCode::InvalidState, os.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > checks.trace_tol) {
    std::ostringstream os;
    os << "trace " << tr.real() << (tr.imag() < 0 ? "-" : "+") << std::abs(tr.imag()) << "i deviates from 1";
    throw Error(ErrorCode::InvalidState, os.str());
  }
  if (rho.rows() <= checks.psd_max_dim) {
    const MatrixXc h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
    const Real lo = es.eigenvalues().minCoeff();
    if (lo < checks.psd_floor) {
      std::ostringstream os;
      os << "negative eigenvalue " << lo;
      throw Error(ErrorCode::InvalidState, os.str());
    }
  }
}

DensityMatrix pure_density(const VectorXc& psi) { return psi * psi.adjoint(); }

EvolveStats evolve(const Superoperator& l, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                   const EvolveObserver& observer, const EvolveOptions& options) {
  if (rho0.rows() != l.hilbert_dim() || rho0.cols() != l.hilbert_dim())
    throw Error(ErrorCode::InvalidArgument, "initial state does not match the chain dimension");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "t_grid must be non-negative and strictly increasing");
  }
  if (options.validate) check_density_matrix(rho0, options.checks);

  auto rhs = [&l](Real, const DensityMatrix& y, DensityMatrix& dy) { l.apply_hermitian(y, dy); };
  linalg::Dopri5Options dopts;
  dopts.rtol = options.rtol;
  dopts.atol = options.atol;
  auto solver = linalg::make_dopri5<DensityMatrix>(rhs, dopts);

  DensityMatrix rho = rho0;
  Real t = 0.0;
  for (Real target : t_grid) {
    solver.integrate(t, rho, target);
    if (options.validate) check_density_matrix(rho, options.checks);
    observer(t, rho);
  }
  return {solver.steps(), solver.rejected()};
}

std::vector<DensityMatrix> evolve(const Superoperator& l, const DensityMatrix& rho0, const std::vector<Real>& t_grid,
                                  const EvolveOptions& options) {
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  evolve(l, rho0, t_grid, [&](Real, const DensityMatrix& rho) { out.push_back(rho); }, options);
  return out;
}

}  // namespace chiral::chain
