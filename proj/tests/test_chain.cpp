#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "chiral/chain/evolve.hpp"
#include "chiral/chain/observables.hpp"
#include "chiral/chain/operators.hpp"
#include "chiral/chain/scans.hpp"
#include "chiral/chain/spectrum.hpp"

using namespace chiral;
using namespace chiral::chain;

namespace {

MatrixXc dense(const SparseRowMatrixC& m) { return MatrixXc(m); }

// Master equation written out term by term on dense matrices:
//   -i[H, rho] + L_B + L_C + (gamma'/2) sum_j D(s_j, s_j)
// with H = -delta sum n_j + sum (Omega_j s_j + h.c.), valid for gamma_r >= gamma_l.
MatrixXc oracle_rhs(const ChainParams& p, const MatrixXc& rho) {
  const int n = p.n_spins;
  std::vector<MatrixXc> s;
  for (int j = 0; j < n; ++j) s.push_back(dense(lowering(n, j)));
  const Index dim = rho.rows();
  MatrixXc h = MatrixXc::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    h -= p.detuning * s[j].adjoint() * s[j];
    const Complex om = p.site_rabi(j);
    h += om * s[j] + std::conj(om) * s[j].adjoint();
  }
  auto d = [&](const MatrixXc& a, const MatrixXc& b) {
    return MatrixXc(2.0 * a * rho * b.adjoint() - b.adjoint() * a * rho - rho * b.adjoint() * a);
  };
  MatrixXc out = -kI * (h * rho - rho * h);
  const Real dg = p.gamma_r - p.gamma_l;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      const Real phi = (j - l) * p.epsilon_comm / 2.0;
      const MatrixXc x = s[l].adjoint() * s[j];
      out += p.gamma_l * (-kI * std::sin(std::abs(phi)) * (x * rho - rho * x) + std::cos(phi) * d(s[j], s[l]));
      if (j > l) {
        // h.c. written linearly in rho so non-Hermitian basis elements work
        const Complex e = std::exp(-kI * phi);
        out += dg * (e * (s[j] * rho * s[l].adjoint() - rho * s[l].adjoint() * s[j]) +
                     std::conj(e) * (s[l] * rho * s[j].adjoint() - s[j].adjoint() * s[l] * rho));
      }
    }
  for (int j = 0; j < n; ++j) out += (dg + p.gamma_prime) / 2.0 * d(s[j], s[j]);
  return out;
}

MatrixXc oracle_superoperator(const ChainParams& p) {
  const Index dim = hilbert_dim(p.n_spins);
  MatrixXc l(dim * dim, dim * dim);
  for (Index b = 0; b < dim; ++b)
    for (Index a = 0; a < dim; ++a) {
      MatrixXc e = MatrixXc::Zero(dim, dim);
      e(a, b) = 1.0;
      const MatrixXc r = oracle_rhs(p, e);
      l.col(a + b * dim) = Eigen::Map<const VectorXc>(r.data(), r.size());
    }
  return l;
}

ChainParams random_params(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<Real> u(0.0, 1.0);
  ChainParams p;
  p.n_spins = n;
  p.rabi = Complex(u(rng) - 0.5, u(rng) - 0.5);
  p.detuning = u(rng) - 0.5;
  p.gamma_r = 0.5 + u(rng);
  p.gamma_l = u(rng) * p.gamma_r;
  p.epsilon_comm = 2.0 * u(rng);
  p.gamma_prime = 0.3 * u(rng);
  return p;
}

Real trace_norm(const MatrixXc& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

ChainParams dimer_params(int n, Real gl) {
  ChainParams p;
  p.n_spins = n;
  p.rabi = 0.5;
  p.gamma_l = gl;
  p.gamma_r = 1.0;
  return p;
}

}  // namespace

TEST_CASE("Liouvillian matches the term-by-term master equation") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 3}) {
    for (int rep = 0; rep < 5; ++rep) {
      auto p = random_params(rng, n);
      if (rep == 4) p.site_phases = std::vector<Real>(n, 0.3);
      const MatrixXc ref = oracle_superoperator(p);
      const MatrixXc got = build_liouvillian(p).to_dense();
      CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("matrix-free actions agree with the assembled superoperator") {
  std::mt19937_64 rng(3);
  const auto p = random_params(rng, 3);
  const auto l = build_liouvillian(p);
  const MatrixXc m = l.to_dense();
  RowMatrixXc rho = RowMatrixXc::Random(8, 8);
  rho = (rho + rho.adjoint().eval()) / 2.0;
  RowMatrixXc a, b, c;
  l.apply(rho, a);
  l.apply_hermitian(rho, b);
  CHECK((vectorize(a) - m * vectorize(rho)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((vectorize(b) - m * vectorize(rho)).cwiseAbs().maxCoeff() < 1e-12);
  l.apply_adjoint(rho, c);
  CHECK((vectorize(c) - m.adjoint() * vectorize(rho)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace preservation over random draws") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_params(rng, 1 + i % 4);
    const auto l = build_liouvillian(p);
    const Index dim = hilbert_dim(p.n_spins);
    RowMatrixXc eye = RowMatrixXc::Identity(dim, dim), out;
    l.apply_adjoint(eye, out);
    CHECK(out.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mirror symmetry: reversed sites with swapped rates") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    auto p = random_params(rng, 3);
    p.site_phases = {0.1, -0.4, 0.7};
    auto q = p;
    std::swap(q.gamma_l, q.gamma_r);
    q.site_phases = {0.7, -0.4, 0.1};
    const Index dim = 8;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(dim);
    for (Index s = 0; s < dim; ++s) {
      Index r = 0;
      for (int j = 0; j < 3; ++j)
        if (s & site_mask(3, j)) r |= site_mask(3, 2 - j);
      perm.indices()(s) = static_cast<int>(r);
    }
    const MatrixXc pm = perm.toDenseMatrix().cast<Complex>();
    const MatrixXc big = Eigen::kroneckerProduct(pm, pm);
    const MatrixXc a = build_liouvillian(p).to_dense();
    const MatrixXc b = build_liouvillian(q).to_dense();
    CHECK((big * a * big.transpose() - b).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::ComplexEigenSolver<MatrixXc> ea(a, false), eb(b, false);
    auto sorted = [](VectorXc v) {
      std::vector<Complex> x(v.data(), v.data() + v.size());
      std::sort(x.begin(), x.end(), [](Complex u, Complex w) {
        return std::abs(u.real() - w.real()) > 1e-7 ? u.real() < w.real() : u.imag() < w.imag();
      });
      return x;
    };
    const auto sa = sorted(ea.eigenvalues()), sb = sorted(eb.eigenvalues());
    Real worst = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) worst = std::max(worst, std::abs(sa[i] - sb[i]));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("single spin decays at gamma_L + gamma_R") {
  ChainParams p;
  p.n_spins = 1;
  p.rabi = 0.0;
  p.gamma_l = 0.3;
  p.gamma_r = 0.9;
  VectorXc e(2);
  e << 0.0, 1.0;
  const auto out = evolve(build_liouvillian(p), pure_density(e), {0.0, 0.5, 1.0, 3.0});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Real t = std::vector<Real>{0.0, 0.5, 1.0, 3.0}[i];
    CHECK(out[i](1, 1).real() == doctest::Approx(std::exp(-1.2 * t)).epsilon(1e-7));
  }
}

TEST_CASE("dimer product amplitudes") {
  auto z = dimer_params(2, 0.0);
  z.rabi = 0.0;
  const auto g = dimer_product(z);
  CHECK(std::abs(g.state(0) - 1.0) < 1e-15);
  const auto d = dimer_product(dimer_params(2, 0.0));
  CHECK(std::abs(d.alpha - Complex(0.0, std::sqrt(2.0))) < 1e-14);
  const Real c = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(d.pair_state(0) - c) < 1e-14);
  CHECK(std::abs(d.pair_state(1) - Complex(0.0, c)) < 1e-14);
  CHECK(std::abs(d.pair_state(2) - Complex(0.0, -c)) < 1e-14);
  CHECK(std::abs(d.pair_state(3)) < 1e-15);
  // large asymmetry at fixed drive approaches |gg>
  Real prev = 0.0;
  for (Real gr : {1.0, 4.0, 16.0, 64.0}) {
    auto p = dimer_params(2, 0.0);
    p.gamma_r = gr;
    const Real overlap = std::norm(dimer_product(p).pair_state(0));
    CHECK(overlap > prev);
    prev = overlap;
  }
  CHECK(prev > 0.999);
  CHECK_THROWS_AS(dimer_product(dimer_params(3, 0.0)), Error);
}

TEST_CASE("dimer product is a dark state of the generator") {
  for (int n : {2, 4, 6}) {
    for (Real gl : {0.0, 0.4, 1.7}) {
      auto p = dimer_params(n, gl);
      p.rabi = Complex(0.3, -0.6);
      const auto l = build_liouvillian(p);
      const RowMatrixXc rho = pure_density(dimer_product(p).state);
      RowMatrixXc out;
      l.apply(rho, out);
      CHECK(out.cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("steady state: unique pure dimer for even chains") {
  for (int n : {2, 4}) {
    for (Real gl : {0.0, 0.4}) {
      const auto p = dimer_params(n, gl);
      const auto ss = steady_state(build_liouvillian(p));
      CHECK(ss.nullspace_dim == 1);
      CHECK(fidelity(ss.rho, dimer_product(p).state) > 1.0 - 1e-8);
      CHECK(purity(ss.rho) > 1.0 - 1e-8);
    }
  }
}

TEST_CASE("steady state: degenerate without asymmetry") {
  auto p = dimer_params(4, 1.0);
  p.rabi = 0.5;
  CHECK(steady_state(build_liouvillian(p)).nullspace_dim > 1);
}

TEST_CASE("steady state: driven two-level system") {
  for (Real om : {0.2, 0.5, 1.3}) {
    ChainParams p;
    p.n_spins = 1;
    p.rabi = om;
    p.gamma_l = 0.25;
    p.gamma_r = 1.0;
    const Real g = p.gamma_l + p.gamma_r;
    const auto ss = steady_state(build_liouvillian(p));
    CHECK(ss.rho(1, 1).real() == doctest::Approx(4.0 * om * om / (g * g + 8.0 * om * om)).epsilon(1e-9));
    CHECK(std::abs(ss.rho(0, 1)) == doctest::Approx(2.0 * om * g / (g * g + 8.0 * om * om)).epsilon(1e-9));
  }
}

TEST_CASE("observables on product and dimer states") {
  const RowMatrixXc g = pure_density(ground_state(4));
  for (int j = 0; j < 3; ++j) CHECK(entropy(reduced_pair(g, j, j + 1)) == doctest::Approx(0.0));
  CHECK(purity(g) == doctest::Approx(1.0));

  const auto d = dimer_product(dimer_params(4, 0.0));
  const RowMatrixXc rho = pure_density(d.state);
  CHECK(entropy(reduced_pair(rho, 0, 1)) < 1e-12);
  CHECK(purity(reduced_pair(rho, 0, 1)) == doctest::Approx(1.0));
  // single-site marginal of |D> = a|gg> + b|ge> - b|eg>
  const Complex a = d.pair_state(0), b = d.pair_state(1);
  Eigen::Matrix2cd site;
  site << std::norm(a) + std::norm(b), -a * std::conj(b), -std::conj(a) * b, std::norm(b);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(site);
  Real s1 = 0.0;
  for (int i = 0; i < 2; ++i) s1 -= es.eigenvalues()(i) * std::log(es.eigenvalues()(i));
  CHECK(entropy(reduced_pair(rho, 1, 2)) == doctest::Approx(2.0 * s1).epsilon(1e-10));

  CHECK(entropy(MatrixXc(MatrixXc::Identity(4, 4) / 4.0)) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK_THROWS_AS(reduced_pair(rho, 1, 1), Error);
  CHECK_THROWS_AS(reduced_pair(rho, 0, 4), Error);
}

TEST_CASE("evolve: trivial generator leaves the state unchanged") {
  ChainParams p;
  p.n_spins = 2;
  p.rabi = 0.0;
  p.gamma_l = 0.0;
  p.gamma_r = 0.0;
  VectorXc psi = VectorXc::Random(4).normalized();
  const RowMatrixXc rho = pure_density(psi);
  const auto out = evolve(build_liouvillian(p), rho, {0.0, 1.0, 7.0});
  for (const auto& r : out) CHECK((r - rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("evolve: matches the matrix exponential for N = 2") {
  std::mt19937_64 rng(23);
  const auto p = random_params(rng, 2);
  const auto l = build_liouvillian(p);
  const MatrixXc m = l.to_dense();
  const RowMatrixXc rho0 = pure_density(ground_state(2));
  std::vector<Real> times = {0.0};
  std::uniform_real_distribution<Real> u(0.0, 10.0);
  for (int i = 0; i < 10; ++i) times.push_back(u(rng));
  std::sort(times.begin(), times.end());
  EvolveOptions o;
  o.rtol = 1e-11;
  o.atol = 1e-13;
  const auto out = evolve(l, rho0, times, o);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const MatrixXc prop = (m * times[i]).exp();
    const RowMatrixXc ref = unvectorize(prop * vectorize(rho0), 4);
    CHECK(trace_norm(out[i] - ref) < 1e-8);
  }
}

TEST_CASE("evolve: long-time limit reaches the steady state") {
  const auto p = dimer_params(4, 0.4);
  const auto l = build_liouvillian(p);
  const auto gap = liouvillian_gap(l);
  const auto ss = steady_state(l);
  const auto out = evolve(l, pure_density(ground_state(4)), {0.0, 20.0 * gap.t_ss});
  CHECK(trace_norm(out.back() - ss.rho) < 1e-6);
  // positivity along the way
  evolve(l, pure_density(ground_state(4)), {0.0, 5.0, 10.0, 50.0}, [](Real, const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(MatrixXc(rho), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  });
}

TEST_CASE("evolve: rejects invalid initial states") {
  const auto l = build_liouvillian(dimer_params(2, 0.0));
  RowMatrixXc bad = RowMatrixXc::Zero(4, 4);
  bad(0, 1) = 1.0;
  bad(0, 0) = 1.0;
  try {
    evolve(l, bad, {0.0, 1.0});
    FAIL("expected InvalidState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
}

TEST_CASE("gap: slower relaxation for weaker asymmetry, t_ss ~ Omega^2 at strong drive") {
  auto p = dimer_params(4, 0.5);
  const auto rows = gap_scan(p, GapAxis::GammaRatio, {0.5, 0.6, 0.7, 0.8});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].t_ss > rows[i - 1].t_ss);
  p.gamma_l = 0.2;
  std::vector<Real> rabi = {2.0, 4.0, 8.0};
  const auto strong = gap_scan(p, GapAxis::Rabi, rabi);
  std::vector<Real> t;
  for (const auto& r : strong) t.push_back(r.t_ss);
  CHECK(fit_power_law(rabi, t).slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("power-law fit recovers an exact exponent") {
  std::vector<Real> x = {1.0, 2.0, 4.0, 8.0}, y;
  for (Real v : x) y.push_back(3.0 * std::pow(v, -4.0));
  const auto f = fit_power_law(x, y);
  CHECK(f.slope == doctest::Approx(-4.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("imperfections: exact dimers at zero, robust at small epsilon, lossy with gamma'") {
  auto p = dimer_params(6, 0.1);
  const auto eps = imperfection_scan(p, Imperfection::Epsilon, {0.0, 0.1});
  for (Real v : eps[0].pair_purities) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  for (Real v : eps[1].pair_purities) CHECK(v >= 0.9);
  auto q = dimer_params(4, 0.0);
  const auto loss = imperfection_scan(q, Imperfection::GammaPrime, {0.0, 0.05, 0.2, 20.0});
  for (std::size_t i = 1; i < 3; ++i) {
    for (std::size_t k = 0; k < loss[i].pair_purities.size(); ++k)
      CHECK(loss[i].pair_purities[k] < loss[i - 1].pair_purities[k]);
    CHECK(loss[i].purity < loss[i - 1].purity);
  }
  for (Real v : loss[2].pair_purities) CHECK(v < 0.9);
  // loss much faster than the drive pins every spin near |g>
  CHECK(loss[3].purity > 0.99);
}

TEST_CASE("errors: dimension cap and odd chains") {
  ChainParams p;
  p.n_spins = 13;
  try {
    build_liouvillian(p);
    FAIL("expected DimensionOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionOverflow);
  }
  try {
    dimer_product(dimer_params(5, 0.0));
    FAIL("expected OddChain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddChain);
  }
  try {
    dimer_product(dimer_params(4, 1.0));
    FAIL("expected ZeroAsymmetry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroAsymmetry);
  }
}
