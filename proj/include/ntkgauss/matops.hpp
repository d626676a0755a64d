#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "ntkgauss/errors.hpp"

namespace ntkgauss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense real symmetric matrix. Inputs are symmetrized as (B + Bᵀ)/2 on
/// construction; asymmetry beyond 1e-12 relative (a caller bug, not
/// floating-point Gram noise) and non-finite entries are rejected.
class SymMatrix {
public:
  explicit SymMatrix(const Matrix& b) {
    if (b.rows() != b.cols())
      throw InvalidShape("SymMatrix: matrix must be square, got " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    if (!b.allFinite())
      throw InvalidMatrix("SymMatrix: non-finite entries");
    const double asym = (b - b.transpose()).norm();
    if (asym > 1e-12 * std::max(1.0, b.norm()))
      throw InvalidMatrix("SymMatrix: asymmetry " + std::to_string(asym) +
                          " exceeds 1e-12 relative tolerance");
    m_ = 0.5 * (b + b.transpose());
  }

  static SymMatrix identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }
  static SymMatrix zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

  Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

private:
  Matrix m_;
};

/// Spectral decomposition B = U diag(λ) Uᵀ, eigenvalues ascending.
struct EigDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;  // columns
};

inline EigDecomp sym_eig(const SymMatrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(b.mat());
  if (solver.info() != Eigen::Success)
    throw InvalidMatrix("sym_eig: eigendecomposition failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// e^{-Bt} assembled from an existing decomposition of B.
inline Matrix expm_neg(const EigDecomp& eig, double t) {
  if (t < 0.0) throw InvalidTime("expm_neg: t must be nonnegative");
  const Vector d = (-t * eig.eigenvalues.array()).exp();
  Matrix r = eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (r + r.transpose().eval());
}

inline Matrix expm_neg(const SymMatrix& b, double t) { return expm_neg(sym_eig(b), t); }

/// Scalar map a ↦ ∫₀ᵗ e^{-as} ds. Below |a·t| = 1e-6 the closed form
/// (1 - e^{-at})/a cancels catastrophically, so a 3-term Taylor expansion
/// t - at²/2 + a²t³/6 takes over; both branches agree to < 1e-12 relative
/// at the switch point, and a = 0 lands exactly on I_t(0) = t.
inline double i_t_scalar(double a, double t) {
  const double at = a * t;
  if (std::abs(at) < 1e-6) return t * (1.0 - at / 2.0 + at * at / 6.0);
  return -std::expm1(-at) / a;
}

/// Spectral extension of the scalar map: I_t(B) = U diag(I_t(λᵢ)) Uᵀ.
inline Matrix i_t(const EigDecomp& eig, double t) {
  if (t < 0.0) throw InvalidTime("i_t: t must be nonnegative");
  Vector d(eig.eigenvalues.size());
  for (Index i = 0; i < d.size(); ++i) d[i] = i_t_scalar(eig.eigenvalues[i], t);
  Matrix r = eig.eigenvectors * d.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (r + r.transpose().eval());
}

inline Matrix i_t(const SymMatrix& b, double t) { return i_t(sym_eig(b), t); }

struct CholResult {
  Matrix lower;
  double jitter;  // ε actually used: L·Lᵀ = B + ε·I
};

/// Cholesky with a jitter ladder {0, 1e-12, 1e-10, 1e-8}·trace(B)/dim, the
/// usual GP-sampling escalation. The exact zero matrix factors as L = 0
/// (the ladder would be identically zero there).
inline CholResult chol_jitter(const SymMatrix& b) {
  const Index n = b.dim();
  if (b.mat().isZero(0.0)) return {Matrix::Zero(n, n), 0.0};
  const double unit = b.mat().trace() / static_cast<double>(n);
  constexpr std::array<double, 4> ladder = {0.0, 1e-12, 1e-10, 1e-8};
  for (double scale : ladder) {
    const double eps = scale * unit;
    Matrix shifted = b.mat();
    shifted.diagonal().array() += eps;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) return {Matrix(llt.matrixL()), eps};
  }
  throw NotPSD("chol_jitter: factorization failed at all jitter levels (trace/dim = " +
               std::to_string(unit) + ")");
}

inline double min_eig(const SymMatrix& b) {
  return sym_eig(b).eigenvalues[0];
}

}  // namespace ntkgauss
