#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ntkgauss/matops.hpp"
#include "ntkgauss/rng.hpp"

using namespace ntkgauss;

namespace {

Matrix random_sym(Index n, RandomStream& s, double scale = 1.0) {
  Matrix b(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) b(i, j) = scale * s.normal();
  return 0.5 * (b + b.transpose().eval());
}

// Symmetric matrix with a prescribed spectrum (one entry may be exactly 0).
Matrix sym_with_spectrum(const Vector& lambda, RandomStream& s) {
  const Index n = lambda.size();
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = s.normal();
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Matrix b = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (b + b.transpose().eval());
}

// Oracle: truncated Taylor series of e^{-Bt}, 30 terms.
Matrix taylor_expm_neg(const Matrix& b, double t, int terms = 30) {
  const Index n = b.rows();
  Matrix acc = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    term = term * (-t / static_cast<double>(k)) * b;
    acc += term;
  }
  return acc;
}

}  // namespace

TEST_CASE("SymMatrix construction enforces its invariants") {
  Matrix b(2, 2);
  b << 1.0, 2.0, 2.0 + 1e-15, 3.0;
  const SymMatrix s(b);  // tiny asymmetry is symmetrized away
  REQUIRE(s(0, 1) == s(1, 0));

  b(0, 1) = 2.1;  // gross asymmetry is a caller bug
  REQUIRE_THROWS_AS(SymMatrix(b), InvalidMatrix);

  b(0, 1) = std::nan("");
  REQUIRE_THROWS_AS(SymMatrix(b), InvalidMatrix);

  REQUIRE_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), InvalidShape);
}

TEST_CASE("sym_eig: identity, diagonal, and reconstruction residual") {
  const EigDecomp id = sym_eig(SymMatrix::identity(3));
  for (int i = 0; i < 3; ++i) REQUIRE(id.eigenvalues[i] == Catch::Approx(1.0));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0;
  const EigDecomp de = sym_eig(SymMatrix(d));
  REQUIRE(de.eigenvalues[0] == Catch::Approx(-1.0));
  REQUIRE(de.eigenvalues[1] == Catch::Approx(2.0));

  RandomStream s(1, "matops_eig");
  const Matrix b = random_sym(8, s);
  const SymMatrix sym(b);
  const EigDecomp e = sym_eig(sym);
  const Matrix rec =
      e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
  REQUIRE((rec - sym.mat()).norm() < 1e-10 * sym.mat().norm());
  REQUIRE((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(8, 8))
              .norm() < 1e-10);
  for (Index i = 0; i + 1 < e.eigenvalues.size(); ++i)
    REQUIRE(e.eigenvalues[i] <= e.eigenvalues[i + 1]);
}

TEST_CASE("expm_neg: identity at t=0, scalar case, Taylor-series oracle") {
  RandomStream s(2, "matops_expm");
  const SymMatrix b(random_sym(4, s));
  REQUIRE((expm_neg(b, 0.0) - Matrix::Identity(4, 4)).norm() < 1e-14);

  Matrix one(1, 1);
  one(0, 0) = 1.0;
  REQUIRE(expm_neg(SymMatrix(one), std::log(2.0))(0, 0) == Catch::Approx(0.5));

  const Matrix b5 = random_sym(5, s);
  const Matrix e = expm_neg(SymMatrix(b5), 0.7);
  REQUIRE((e - taylor_expm_neg(b5, 0.7)).norm() < 1e-9);

  REQUIRE_THROWS_AS(expm_neg(b, -0.1), InvalidTime);
}

TEST_CASE("i_t: zero time, zero matrix, and the defining identity") {
  RandomStream s(3, "matops_it");
  const SymMatrix b(random_sym(5, s));
  REQUIRE(i_t(b, 0.0).norm() == 0.0);

  // I_t of the zero matrix is t on the diagonal.
  const Matrix z = i_t(SymMatrix::zero(2), 3.5);
  REQUIRE(z(0, 0) == 3.5);
  REQUIRE(z(1, 1) == 3.5);
  REQUIRE(z(0, 1) == 0.0);

  // PSD matrix with one eigenvalue forced to exactly zero.
  Vector lambda(6);
  lambda << 0.0, 0.3, 0.9, 1.4, 2.2, 5.0;
  const SymMatrix psd(sym_with_spectrum(lambda, s));
  const double t = 2.0;
  const Matrix lhs = i_t(psd, t) * psd.mat();
  const Matrix rhs = Matrix::Identity(6, 6) - expm_neg(psd, t);
  REQUIRE((lhs - rhs).norm() < 1e-10);

  REQUIRE_THROWS_AS(i_t(b, -1.0), InvalidTime);
}

TEST_CASE("i_t scalar branches agree at the switch point") {
  // Oracle: I_t(a) = t·Σ (-at)^k/(k+1)!, truncation far below double eps
  // for |at| ~ 1e-6.
  const double t = 1.0;
  for (double a : {1e-6, -1e-6, 1e-7, 5e-7, 2e-6, -2e-6}) {
    double series = 0.0;
    double term = 1.0;
    for (int k = 0; k < 6; ++k) {
      series += term;
      term *= -a * t / static_cast<double>(k + 2);
    }
    series *= t;
    REQUIRE(std::abs(i_t_scalar(a, t) - series) < 1e-12 * t);
  }
  REQUIRE(i_t_scalar(0.0, 3.5) == 3.5);
}

TEST_CASE("property: I_t(B)·B = 1 - e^{-Bt} for random B including zero modes") {
  // Indefinite spectra in [-1,1]: e^{|λ|t} stays far from overflow so the
  // identity is testable at the stated tolerance.
  RandomStream s(4, "matops_prop");
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 1 + static_cast<Index>(s.uniform() * 12);
    Vector lambda(n);
    for (Index i = 0; i < n; ++i) lambda[i] = s.uniform(-1.0, 1.0);
    if (trial % 2 == 0) lambda[0] = 0.0;
    const SymMatrix b(sym_with_spectrum(lambda, s));
    for (double t : {0.0, 0.5, 10.0}) {
      const Matrix lhs = i_t(b, t) * b.mat();
      const Matrix rhs = Matrix::Identity(n, n) - expm_neg(b, t);
      REQUIRE((lhs - rhs).norm() < 1e-9 * std::max(1.0, b.mat().norm()));
    }
  }
}

TEST_CASE("property: i_t is continuous at degenerate eigenvalues") {
  RandomStream s(5, "matops_cont");
  Vector lambda(5);
  lambda << 0.0, 0.4, 1.1, 1.9, 3.0;
  const Matrix base = sym_with_spectrum(lambda, s);
  const double t = 2.0;
  const Matrix reference = i_t(SymMatrix(base), t);
  for (double delta : {1e-9, 1e-10, 1e-11}) {
    Vector perturbed = lambda;
    perturbed[0] = delta;
    RandomStream s2(5, "matops_cont");  // same rotation
    const Matrix shifted = sym_with_spectrum(perturbed, s2);
    REQUIRE((i_t(SymMatrix(shifted), t) - reference).norm() < 1e-6);
  }
}

TEST_CASE("property: expm_neg is a semigroup in t") {
  RandomStream s(6, "matops_semigroup");
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix b(random_sym(6, s));
    const double u = s.uniform(0.0, 2.0), v = s.uniform(0.0, 2.0);
    REQUIRE((expm_neg(b, u + v) - expm_neg(b, u) * expm_neg(b, v)).norm() < 1e-9);
  }
}

TEST_CASE("property: eigenvalues of i_t(B,t) are I_t of B's spectrum, in [0,t]") {
  // The [0,t] range is a PSD statement (the kernel case): I_t(λ) ≤ t needs λ ≥ 0.
  RandomStream s(7, "matops_spectrum");
  Vector spectrum(7);
  for (Index i = 0; i < 7; ++i) spectrum[i] = s.uniform(0.0, 4.0);
  spectrum[0] = 0.0;
  const SymMatrix b(sym_with_spectrum(spectrum, s));
  const double t = 1.7;
  const EigDecomp eb = sym_eig(b);
  const EigDecomp ei = sym_eig(SymMatrix(i_t(b, t)));
  Vector expected(7);
  for (Index i = 0; i < 7; ++i) expected[i] = i_t_scalar(eb.eigenvalues[i], t);
  std::sort(expected.data(), expected.data() + expected.size());
  for (Index i = 0; i < 7; ++i) {
    REQUIRE(ei.eigenvalues[i] == Catch::Approx(expected[i]).margin(1e-10));
    REQUIRE(ei.eigenvalues[i] >= -1e-12);
    REQUIRE(ei.eigenvalues[i] <= t + 1e-12);
  }
}

TEST_CASE("chol_jitter: exact cases and the rank-deficient ladder") {
  const CholResult id = chol_jitter(SymMatrix::identity(4));
  REQUIRE(id.jitter == 0.0);
  REQUIRE((id.lower - Matrix::Identity(4, 4)).norm() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const CholResult dc = chol_jitter(SymMatrix(d));
  REQUIRE(dc.jitter == 0.0);
  REQUIRE(dc.lower(0, 0) == Catch::Approx(2.0));
  REQUIRE(dc.lower(1, 1) == Catch::Approx(3.0));

  // Rank-1 projector: needs at most the 1e-10 rung.
  RandomStream s(8, "matops_chol");
  Vector v(4);
  for (Index i = 0; i < 4; ++i) v[i] = s.normal();
  v.normalize();
  const SymMatrix rank1(v * v.transpose());
  const CholResult rc = chol_jitter(rank1);
  REQUIRE(rc.jitter <= 1e-10);
  REQUIRE((rc.lower * rc.lower.transpose() - rank1.mat()).norm() <= 2e-10);

  // The zero matrix factors exactly.
  const CholResult zc = chol_jitter(SymMatrix::zero(3));
  REQUIRE(zc.jitter == 0.0);
  REQUIRE(zc.lower.norm() == 0.0);

  Matrix neg = -Matrix::Identity(3, 3);
  REQUIRE_THROWS_AS(chol_jitter(SymMatrix(neg)), NotPSD);
}

TEST_CASE("min_eig: hand-computed spectra") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 0.2;
  d(2, 2) = 5.0;
  REQUIRE(min_eig(SymMatrix(d)) == Catch::Approx(0.2));
  REQUIRE(min_eig(SymMatrix::zero(4)) == Catch::Approx(0.0).margin(1e-15));

  // vvᵀ + 0.1·I with ‖v‖=1 has spectrum {1.1, 0.1, 0.1, 0.1}.
  RandomStream s(9, "matops_mineig");
  Vector v(4);
  for (Index i = 0; i < 4; ++i) v[i] = s.normal();
  v.normalize();
  const SymMatrix b(Matrix(v * v.transpose()) + 0.1 * Matrix::Identity(4, 4));
  REQUIRE(min_eig(b) == Catch::Approx(0.1).margin(1e-12));
}
