#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ntkgauss/errors.hpp"
#include "ntkgauss/matops.hpp"
#include "ntkgauss/network.hpp"

namespace ntkgauss {

/// Frozen ingredients of the linearized dynamics around θ₀: initial outputs
/// and the tangent-kernel blocks, all computed from the same parameters.
/// The train-set kernel is decomposed once; every time evaluation reuses it.
struct LinearizedState {
  NetworkParams base;
  ActivationSpec act;
  Matrix train_x;  // n0 × n
  Matrix test_x;   // n0 × m
  Vector f0_train;
  Vector f0_test;
  SymMatrix k0_train;  // n × n
  Matrix k0_cross;     // m × n
  EigDecomp k0_eig;
};

inline LinearizedState make_linearized_state(const NetworkParams& base,
                                             const ActivationSpec& act,
                                             const Dataset& ds,
                                             const Matrix& test_points) {
  SymMatrix k0 = empirical_ntk_gram(base, act, ds.x);
  const double tr = k0.mat().trace();
  EigDecomp eig = sym_eig(k0);
  if (eig.eigenvalues[0] < -1e-10 * std::max(1.0, tr))
    throw InvalidMatrix("linearized state: k0 train block is not PSD (min eig " +
                        std::to_string(eig.eigenvalues[0]) + ")");
  return LinearizedState{base,
                         act,
                         ds.x,
                         test_points,
                         forward(base, act, ds.x),
                         forward(base, act, test_points),
                         std::move(k0),
                         empirical_ntk(base, act, test_points, ds.x),
                         std::move(eig)};
}

/// First-order Taylor value f(x;θ₀) + ⟨∇f(x;θ₀), θ_new - θ₀⟩.
inline double lin_forward(const LinearizedState& state, const NetworkParams& p_new,
                          const Vector& x) {
  if (p_new.theta0.rows() != state.base.theta0.rows() ||
      p_new.theta0.cols() != state.base.theta0.cols() ||
      p_new.theta1.size() != state.base.theta1.size())
    throw InvalidShape("lin_forward: parameter shapes do not match the base point");
  const Jacobian j = jacobian(state.base, state.act, x);
  return forward(state.base, state.act, x) +
         j.d_theta0.cwiseProduct(p_new.theta0 - state.base.theta0).sum() +
         j.d_theta1.dot(p_new.theta1 - state.base.theta1);
}

/// Closed-form train-set solution e^{-k₀t}·f₀ + (1 - e^{-k₀t})·y.
inline Vector lin_train_solution(const LinearizedState& state, const Vector& y,
                                 double t) {
  if (y.size() != state.f0_train.size())
    throw InvalidShape("lin_train_solution: label size mismatch");
  const Matrix e = expm_neg(state.k0_eig, t);
  return e * state.f0_train + y - e * y;
}

/// Closed-form test-set solution f₀(x) - k₀(x,X)·I_t(k₀)·(f₀(X) - y).
/// Note the residual is the train-set one, f₀(X) - y: the propagated object
/// is n-dimensional, which is what I_t of the n×n train kernel acts on. A
/// test-point residual would not even be dimensionally consistent here.
inline Vector lin_test_solution(const LinearizedState& state, const Vector& y,
                                double t) {
  if (y.size() != state.f0_train.size())
    throw InvalidShape("lin_test_solution: label size mismatch");
  return state.f0_test -
         state.k0_cross * (i_t(state.k0_eig, t) * (state.f0_train - y));
}

struct LinFlowResult {
  std::vector<double> times;
  std::vector<Vector> train_outputs;
  std::vector<Vector> test_outputs;
};

/// Explicit-Euler integration of the linearized flow in ω = θ - θ₀. Exists
/// as a consistency oracle for the closed forms; first-order accurate in dt.
inline LinFlowResult lin_flow_ode(const LinearizedState& state, const Vector& y,
                                  double t_end, double dt) {
  if (dt <= 0.0) throw InvalidArgument("lin_flow_ode: dt must be positive");
  if (t_end < 0.0) throw InvalidTime("lin_flow_ode: t_end must be nonnegative");
  if (y.size() != state.f0_train.size())
    throw InvalidShape("lin_flow_ode: label size mismatch");

  const Index n = state.train_x.cols();
  const Index m = state.test_x.cols();
  const Index n_params = state.base.n0() * state.base.n1() + state.base.n1();

  // Flattened Jacobians at θ₀: columns index points.
  Matrix j_train(n_params, n), j_test(n_params, m);
  auto fill = [&](Matrix& dst, const Matrix& pts) {
    for (Index i = 0; i < pts.cols(); ++i) {
      const Jacobian j = jacobian(state.base, state.act, pts.col(i));
      dst.col(i).head(j.d_theta0.size()) =
          Eigen::Map<const Vector>(j.d_theta0.data(), j.d_theta0.size());
      dst.col(i).tail(j.d_theta1.size()) = j.d_theta1;
    }
  };
  fill(j_train, state.train_x);
  fill(j_test, state.test_x);

  const long n_steps = t_end == 0.0 ? 0 : std::lround(t_end / dt);
  const double h = n_steps == 0 ? 0.0 : t_end / static_cast<double>(n_steps);

  Vector omega = Vector::Zero(n_params);
  LinFlowResult out;
  auto record = [&](double time) {
    const Vector f_train = state.f0_train + j_train.transpose() * omega;
    const Vector f_test = state.f0_test + j_test.transpose() * omega;
    if (!f_train.allFinite() || !f_test.allFinite())
      throw DivergedFlow("lin_flow_ode: outputs diverged at t=" + std::to_string(time));
    out.times.push_back(time);
    out.train_outputs.push_back(f_train);
    out.test_outputs.push_back(f_test);
  };

  record(0.0);
  for (long k = 1; k <= n_steps; ++k) {
    const Vector residual = state.f0_train + j_train.transpose() * omega - y;
    omega -= h * (j_train * residual);
    record(h * static_cast<double>(k));
  }
  return out;
}

}  // namespace ntkgauss
