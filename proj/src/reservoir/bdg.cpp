#include "chiral/reservoir/bdg.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace chiral::reservoir {

namespace {

constexpr Real kGoldstoneWindow = 1e-9;

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

const Matrix4 kSigmaZ = Eigen::Vector4d(1.0, 1.0, -1.0, -1.0).asDiagonal();

Eigen::Matrix2d single_particle(const ReservoirParams& p, Real k) {
  Eigen::Matrix2d h;
  h << k * k + 1.0 + p.delta0 - 2.0 * k, p.omega0, p.omega0, k * k + 1.0 - p.delta0 + 2.0 * k;
  return h;
}

Eigen::Matrix2d couplings(const ReservoirParams& p) {
  Eigen::Matrix2d g;
  g << p.g_uu, p.g_ud, p.g_ud, p.g_dd;
  return g;
}

// Rotation lab -> rotated basis including the sign of the down component
// of the condensate spinor. Symmetric and orthogonal.
Eigen::Matrix2d rotation(const PlaneWaveSolution& pw) {
  const Real c = std::cos(pw.theta_q / 2.0), s = std::sin(pw.theta_q / 2.0);
  Eigen::Matrix2d t;
  t << c, s, s, -c;
  return t;
}

BdgMode make_mode(Real k, Branch b, Real omega, const Vector4& w, const PlaneWaveSolution& pw) {
  BdgMode m;
  m.k = k;
  m.branch = b;
  m.omega = omega;
  m.u_plus = w(0);
  m.u_minus = w(1);
  m.v_plus = w(2);
  m.v_minus = w(3);
  const Real c = std::cos(pw.theta_q / 2.0), s = std::sin(pw.theta_q / 2.0);
  const Real qp = w(0) + w(2), qm = w(1) + w(3);
  m.q_up = c * qp + s * qm;
  m.q_down = -s * qp + c * qm;
  return m;
}

// Positive-norm eigenpairs of sigma_z H from the general real eigensolver.
std::vector<std::pair<Real, Vector4>> general_modes(const Matrix4& h) {
  const Matrix4 m = kSigmaZ * h;
  Eigen::EigenSolver<Matrix4> es(m, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::DiagonalizationFailure, "4x4 eigensolver failed");
  const Real scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  std::vector<std::pair<Real, Vector4>> out;
  for (int i = 0; i < 4; ++i) {
    const std::complex<Real> lam = es.eigenvalues()(i);
    if (std::abs(lam.imag()) > 1e-9 * scale)
      throw Error(ErrorCode::DiagonalizationFailure,
                  "complex Bogoliubov frequency " + std::to_string(lam.real()) + (lam.imag() < 0 ? "" : "+") +
                      std::to_string(lam.imag()) + "i: dynamically unstable phase");
    Eigen::Vector4cd z = es.eigenvectors().col(i);
    Index big = 0;
    z.cwiseAbs().maxCoeff(&big);
    z /= z(big) / std::abs(z(big));
    Vector4 w = z.real();
    const Real nrm = w.dot(kSigmaZ * w);
    if (nrm <= 1e-12 * w.squaredNorm()) continue;
    out.emplace_back(lam.real(), w / std::sqrt(nrm));
  }
  return out;
}

}  // namespace

const char* to_string(Branch b) { return b == Branch::Lower ? "-" : "+"; }

std::vector<Real> default_k_grid(Index n, Real k_min, Real k_max) {
  if (n < 2 || !(k_max > k_min)) throw Error(ErrorCode::InvalidArgument, "k grid needs n >= 2 and k_max > k_min");
  std::vector<Real> k(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) k[i] = k_min + (k_max - k_min) * static_cast<Real>(i) / static_cast<Real>(n - 1);
  return k;
}

Eigen::Matrix4d bdg_hamiltonian(const ReservoirParams& params, const PlaneWaveSolution& pw, Real p) {
  const Eigen::Vector2d chi(std::sqrt(pw.rho_up), -std::sqrt(pw.rho_down));
  const Eigen::Matrix2d g = couplings(params);
  const Eigen::Vector2d n = g * chi.cwiseProduct(chi);
  const Eigen::Matrix2d w = g.cwiseProduct(chi * chi.transpose());
  const Eigen::Matrix2d base = Eigen::Matrix2d(n.asDiagonal()) - pw.mu * Eigen::Matrix2d::Identity() + w;
  const Eigen::Matrix2d a_plus = single_particle(params, pw.k_m + p) + base;
  const Eigen::Matrix2d a_minus = single_particle(params, pw.k_m - p) + base;
  const Eigen::Matrix2d t = rotation(pw);
  Matrix4 h;
  h << t * a_plus * t, t * w * t, t * w * t, t * a_minus * t;
  return h;
}

std::pair<BdgMode, BdgMode> bdg_pair(const ReservoirParams& params, const PlaneWaveSolution& pw, Real k) {
  if (!std::isfinite(k)) throw Error(ErrorCode::InvalidArgument, "non-finite wavevector");
  const Real p = k - pw.k_m;
  const Matrix4 h = bdg_hamiltonian(params, pw, p);

  if (std::abs(p) < kGoldstoneWindow) {
    BdgMode lower;
    lower.k = k;
    lower.zero_mode = true;
    auto modes = general_modes(h);
    Real best = -1.0;
    Vector4 w = Vector4::Zero();
    for (auto& [om, vec] : modes)
      if (om > best) best = om, w = vec;
    if (best <= 0.0) throw Error(ErrorCode::DiagonalizationFailure, "no gapped branch at the condensation point");
    return {lower, make_mode(k, Branch::Upper, best, w, pw)};
  }

  std::array<Real, 2> omega{};
  std::array<Vector4, 2> vec;
  Eigen::LLT<Matrix4> llt(h);
  if (llt.info() == Eigen::Success) {
    // sigma_z H w = omega w  <=>  (L^T sigma_z L) y = omega y with w = sigma_z L y / sqrt(omega)
    const Matrix4 l = llt.matrixL();
    const Matrix4 y = l.transpose() * kSigmaZ * l;
    Eigen::SelfAdjointEigenSolver<Matrix4> es(y);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::DiagonalizationFailure, "symmetric 4x4 eigensolver failed");
    // ascending: two negative then two positive
    for (int b = 0; b < 2; ++b) {
      const Real om = es.eigenvalues()(2 + b);
      if (om <= 0.0) throw Error(ErrorCode::DiagonalizationFailure, "non-positive frequency with positive-definite H");
      omega[b] = om;
      vec[b] = kSigmaZ * l * es.eigenvectors().col(2 + b) / std::sqrt(om);
    }
  } else {
    auto modes = general_modes(h);
    std::vector<std::pair<Real, Vector4>> pos;
    for (auto& m : modes)
      if (m.first >= 0.0) pos.push_back(m);
    if (pos.size() != 2)
      throw Error(ErrorCode::DiagonalizationFailure,
                  "expected two positive-norm modes with non-negative frequency at k=" + std::to_string(k));
    if (pos[0].first > pos[1].first) std::swap(pos[0], pos[1]);
    for (int b = 0; b < 2; ++b) omega[b] = pos[b].first, vec[b] = pos[b].second;
  }
  return {make_mode(k, Branch::Lower, omega[0], vec[0], pw), make_mode(k, Branch::Upper, omega[1], vec[1], pw)};
}

namespace {

Vector4 amplitudes(const BdgMode& m) { return Vector4(m.u_plus, m.u_minus, m.v_plus, m.v_minus); }

void flip(BdgMode& m, const PlaneWaveSolution& pw) { m = make_mode(m.k, m.branch, m.omega, -amplitudes(m), pw); }

void fix_gauge(std::vector<BdgMode>& modes, const PlaneWaveSolution& pw) {
  const BdgMode* prev = nullptr;
  for (auto& m : modes) {
    if (m.zero_mode) {
      prev = nullptr;
      continue;
    }
    const Vector4 w = amplitudes(m);
    if (prev == nullptr) {
      const Real u = std::abs(m.u_plus) >= std::abs(m.u_minus) ? m.u_plus : m.u_minus;
      if (u < 0.0) flip(m, pw);
    } else if (w.dot(amplitudes(*prev)) < 0.0) {
      flip(m, pw);
    }
    prev = &m;
  }
}

}  // namespace

BdgSpectrum bdg_modes(const ReservoirParams& params, const PlaneWaveSolution& pw, const std::vector<Real>& k_grid) {
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!std::isfinite(k_grid[i])) throw Error(ErrorCode::InvalidArgument, "non-finite k grid entry");
    if (i > 0 && !(k_grid[i] > k_grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "k grid must increase strictly");
  }
  BdgSpectrum s;
  s.params = params;
  s.pw = pw;
  s.k = k_grid;
  s.lower.reserve(k_grid.size());
  s.upper.reserve(k_grid.size());
  for (Real k : k_grid) {
    auto [lo, up] = bdg_pair(params, pw, k);
    s.lower.push_back(lo);
    s.upper.push_back(up);
  }
  fix_gauge(s.lower, pw);
  fix_gauge(s.upper, pw);
  return s;
}

}  // namespace chiral::reservoir
