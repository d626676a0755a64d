#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ntkgauss/activation.hpp"
#include "ntkgauss/errors.hpp"
#include "ntkgauss/matops.hpp"
#include "ntkgauss/rng.hpp"

namespace ntkgauss {

/// Weights of the shallow network f(x;θ) = (1/√n1)·Φ((1/√n0)·xᵀθ⁰)·θ¹.
struct NetworkParams {
  Matrix theta0;  // n0 × n1 inner weights
  Vector theta1;  // n1 outer weights
  std::uint64_t seed = 0;

  Index n0() const { return theta0.rows(); }
  Index n1() const { return theta0.cols(); }
};

struct Dataset {
  Matrix x;  // n0 × n, columns are training points
  Vector y;  // n labels

  Index n0() const { return x.rows(); }
  Index n() const { return x.cols(); }

  /// Duplicate training inputs make the limiting Gram singular; callers
  /// treat this as a warning, not an error.
  bool has_duplicate_columns(double tol = 1e-12) const {
    for (Index i = 0; i < x.cols(); ++i)
      for (Index j = i + 1; j < x.cols(); ++j)
        if ((x.col(i) - x.col(j)).norm() <= tol * std::max(1.0, x.col(i).norm()))
          return true;
    return false;
  }
};

/// Gradient-descent checkpoints; times are lr·step.
struct Trajectory {
  std::vector<double> times;
  std::vector<NetworkParams> params_at;
  std::vector<Vector> train_outputs_at;
  std::vector<double> loss_at;
};

/// iid standard-normal initialization from counter-based streams keyed by
/// (seed, tensor name, replica), deterministic and overlap-free across
/// replicas.
inline NetworkParams init_params(Index n0, Index n1, std::uint64_t seed,
                                 std::uint64_t replica = 0) {
  if (n0 < 1 || n1 < 1)
    throw InvalidShape("init_params: dimensions must be positive, got n0=" +
                       std::to_string(n0) + " n1=" + std::to_string(n1));
  NetworkParams p;
  p.seed = seed;
  p.theta0.resize(n0, n1);
  p.theta1.resize(n1);
  RandomStream inner(seed, "theta0", replica);
  RandomStream outer(seed, "theta1", replica);
  for (Index j = 0; j < n1; ++j)
    for (Index i = 0; i < n0; ++i) p.theta0(i, j) = inner.normal();
  for (Index j = 0; j < n1; ++j) p.theta1[j] = outer.normal();
  return p;
}

namespace detail {

inline void check_point_dim(const NetworkParams& p, Index rows, const char* where) {
  if (rows != p.n0())
    throw InvalidShape(std::string(where) + ": input dimension " + std::to_string(rows) +
                       " does not match n0=" + std::to_string(p.n0()));
}

// Batch preactivations, one column per input point: H = (1/√n0)·θ0ᵀ·X.
inline Matrix preactivation_matrix(const NetworkParams& p, const Matrix& points) {
  check_point_dim(p, points.rows(), "preactivations");
  return (p.theta0.transpose() * points) / std::sqrt(static_cast<double>(p.n0()));
}

}  // namespace detail

inline Vector preactivations(const NetworkParams& p, const Vector& x) {
  return detail::preactivation_matrix(p, x);
}

/// Batch forward pass; entry j is f(x_j;θ).
inline Vector forward(const NetworkParams& p, const ActivationSpec& act,
                      const Matrix& points) {
  const Matrix h = detail::preactivation_matrix(p, points);
  const Matrix a = h.unaryExpr(act.phi);
  return a.transpose() * p.theta1 / std::sqrt(static_cast<double>(p.n1()));
}

inline double forward(const NetworkParams& p, const ActivationSpec& act,
                      const Vector& x) {
  return forward(p, act, Matrix(x))[0];
}

/// Both gradient blocks of f at a single point, in closed form:
/// ∂f/∂θ⁰ = (1/√(n1·n0))·x·(Φ'(h)∘θ¹)ᵀ and ∂f/∂θ¹ = (1/√n1)·Φ(h).
struct Jacobian {
  Matrix d_theta0;  // n0 × n1
  Vector d_theta1;  // n1

  /// Flattened inner product ⟨∇f(x), ∇f(x')⟩.
  double dot(const Jacobian& other) const {
    return d_theta0.cwiseProduct(other.d_theta0).sum() + d_theta1.dot(other.d_theta1);
  }
};

inline Jacobian jacobian(const NetworkParams& p, const ActivationSpec& act,
                         const Vector& x) {
  detail::check_point_dim(p, x.size(), "jacobian");
  const Vector h = preactivations(p, x);
  const double s1 = std::sqrt(static_cast<double>(p.n1()));
  Jacobian j;
  j.d_theta1 = h.unaryExpr(act.phi) / s1;
  const Vector w = h.unaryExpr(act.dphi).cwiseProduct(p.theta1) /
                   (s1 * std::sqrt(static_cast<double>(p.n0())));
  j.d_theta0 = x * w.transpose();
  return j;
}

/// Empirical NTK block k(A,B;θ); entry (i,j) is the closed-form sum
/// (1/(n1·n0))·(aᵢᵀbⱼ)·Σᵥ Φ'(hᵥ(aᵢ))Φ'(hᵥ(bⱼ))(θ¹ᵥ)² + (1/n1)·ΣᵥΦ(hᵥ(aᵢ))Φ(hᵥ(bⱼ)).
inline Matrix empirical_ntk(const NetworkParams& p, const ActivationSpec& act,
                            const Matrix& a, const Matrix& b) {
  detail::check_point_dim(p, a.rows(), "empirical_ntk");
  detail::check_point_dim(p, b.rows(), "empirical_ntk");
  const double n0 = static_cast<double>(p.n0());
  const double n1 = static_cast<double>(p.n1());
  const Matrix ha = detail::preactivation_matrix(p, a);  // n1 × |A|
  const Matrix hb = detail::preactivation_matrix(p, b);
  const Matrix wa = ha.unaryExpr(act.dphi).array().colwise() * p.theta1.array();
  const Matrix wb = hb.unaryExpr(act.dphi).array().colwise() * p.theta1.array();
  const Matrix inner = (a.transpose() * b).cwiseProduct(wa.transpose() * wb) / (n1 * n0);
  const Matrix outer = ha.unaryExpr(act.phi).transpose() * hb.unaryExpr(act.phi) / n1;
  return inner + outer;
}

inline SymMatrix empirical_ntk_gram(const NetworkParams& p, const ActivationSpec& act,
                                    const Matrix& points) {
  Matrix k = empirical_ntk(p, act, points, points);
  return SymMatrix(0.5 * (k + k.transpose().eval()));
}

/// Common diagonal value of the hidden-layer kernel: xᵀx'/n0.
inline double hidden_ntk(const Vector& x, const Vector& x_prime) {
  if (x.size() != x_prime.size())
    throw InvalidShape("hidden_ntk: dimension mismatch");
  return x.dot(x_prime) / static_cast<double>(x.size());
}

/// Training time associated with a discrete run: t = lr·steps.
inline double time_of(double lr, long steps) { return lr * static_cast<double>(steps); }

/// Full-batch explicit-Euler gradient descent on the unscaled squared loss
/// ½‖f(X;θ)-y‖². Checkpoints at step 0, every `checkpoint_every` steps, and
/// the final step.
inline Trajectory train_gd(const NetworkParams& p0, const ActivationSpec& act,
                           const Dataset& ds, double lr, long steps,
                           long checkpoint_every) {
  if (lr <= 0.0) throw InvalidArgument("train_gd: lr must be positive");
  if (steps < 0) throw InvalidArgument("train_gd: steps must be nonnegative");
  if (checkpoint_every < 1)
    throw InvalidArgument("train_gd: checkpoint_every must be positive");
  detail::check_point_dim(p0, ds.x.rows(), "train_gd");
  if (ds.y.size() != ds.x.cols())
    throw InvalidShape("train_gd: label count does not match point count");

  const double s1 = std::sqrt(static_cast<double>(p0.n1()));
  const double s01 = s1 * std::sqrt(static_cast<double>(p0.n0()));

  NetworkParams p = p0;
  Trajectory traj;
  auto record = [&](long step) {
    const Vector f = forward(p, act, ds.x);
    const double loss = 0.5 * (f - ds.y).squaredNorm();
    if (!std::isfinite(loss))
      throw DivergedTraining("train_gd: loss diverged at step " + std::to_string(step),
                             step);
    traj.times.push_back(time_of(lr, step));
    traj.params_at.push_back(p);
    traj.train_outputs_at.push_back(f);
    traj.loss_at.push_back(loss);
  };

  record(0);
  for (long step = 1; step <= steps; ++step) {
    const Matrix h = detail::preactivation_matrix(p, ds.x);  // n1 × n
    const Vector f = h.unaryExpr(act.phi).transpose() * p.theta1 / s1;
    const Vector r = f - ds.y;
    if (!r.allFinite())
      throw DivergedTraining("train_gd: outputs diverged at step " + std::to_string(step),
                             step);
    const Vector g1 = h.unaryExpr(act.phi) * r / s1;
    // M(v,i) = Φ'(h_v(x_i))·r_i; θ⁰ gradient is (1/√(n1n0))·X·Mᵀ scaled by θ¹.
    const Matrix m = h.unaryExpr(act.dphi).array().rowwise() * r.transpose().array();
    const Matrix g0 = (ds.x * m.transpose()).array().rowwise() *
                      (p.theta1.transpose().array() / s01);
    p.theta0 -= lr * g0;
    p.theta1 -= lr * g1;
    if (step % checkpoint_every == 0 || step == steps) record(step);
  }
  return traj;
}

}  // namespace ntkgauss
