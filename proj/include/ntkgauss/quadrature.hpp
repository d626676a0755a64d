#pragma once

#include <cmath>
#include <string>

#include "ntkgauss/errors.hpp"
#include "ntkgauss/matops.hpp"

namespace ntkgauss {

/// Probabilists' Gauss–Hermite rule: integrates g against the standard
/// normal density exactly for polynomials of degree < 2·order. Weights sum
/// to one.
struct QuadratureRule {
  int order;
  Vector nodes;
  Vector weights;
};

/// Golub–Welsch construction: nodes are the eigenvalues of the Jacobi
/// matrix of the probabilists' Hermite recurrence (off-diagonal √k), and
/// weights the squared first eigenvector components.
inline QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw InvalidArgument("gauss_hermite: order must be >= 1");
  if (order == 1) {
    QuadratureRule r{1, Vector(1), Vector(1)};
    r.nodes[0] = 0.0;
    r.weights[0] = 1.0;
    return r;
  }
  Vector diag = Vector::Zero(order);
  Vector sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw InvalidMatrix("gauss_hermite: Jacobi eigendecomposition failed");
  QuadratureRule r{order, solver.eigenvalues(),
                   solver.eigenvectors().row(0).transpose().array().square()};
  return r;
}

}  // namespace ntkgauss
