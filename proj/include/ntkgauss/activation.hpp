#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "ntkgauss/errors.hpp"

namespace ntkgauss {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Scalar activation plus the norm bookkeeping the theory checks consume:
/// sup norms of Φ and Φ' and their Lipschitz constants. `bounded` is false
/// for relu, whose sup/Lipschitz fields are not applicable (NaN).
struct ActivationSpec {
  std::string name;
  double (*phi)(double);
  double (*dphi)(double);
  double sup_phi;
  double sup_dphi;
  double lip_phi;   // = sup|Φ'| for the smooth activations here
  double lip_dphi;  // = sup|Φ''|
  bool bounded;     // satisfies the bounded/Lipschitz regularity hypotheses
};

namespace detail {

inline double tanh_phi(double z) { return std::tanh(z); }
inline double tanh_dphi(double z) {
  const double t = std::tanh(z);
  return 1.0 - t * t;
}
inline double sigmoid_phi(double z) { return sigmoid(z); }
inline double sigmoid_dphi(double z) {
  const double s = sigmoid(z);
  return s * (1.0 - s);
}
inline double erf_phi(double z) { return std::erf(z); }
inline double erf_dphi(double z) {
  return 2.0 / std::sqrt(M_PI) * std::exp(-z * z);
}
inline double relu_phi(double z) { return z > 0.0 ? z : 0.0; }
inline double relu_dphi(double z) { return z > 0.0 ? 1.0 : 0.0; }

}  // namespace detail

/// Look up one of the built-in activations: tanh, sigmoid, erf, relu.
inline const ActivationSpec& activation(std::string_view name) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  // max|tanh''| = 4/(3√3); max|σ''| = 1/(6√3); max|erf''| = 4/√(2πe).
  static const ActivationSpec tanh_spec{
      "tanh", detail::tanh_phi, detail::tanh_dphi,
      1.0, 1.0, 1.0, 4.0 / (3.0 * std::sqrt(3.0)), true};
  static const ActivationSpec sigmoid_spec{
      "sigmoid", detail::sigmoid_phi, detail::sigmoid_dphi,
      1.0, 0.25, 0.25, 1.0 / (6.0 * std::sqrt(3.0)), true};
  static const ActivationSpec erf_spec{
      "erf", detail::erf_phi, detail::erf_dphi,
      1.0, 2.0 / std::sqrt(M_PI), 2.0 / std::sqrt(M_PI),
      4.0 / std::sqrt(2.0 * M_PI * M_E), true};
  static const ActivationSpec relu_spec{
      "relu", detail::relu_phi, detail::relu_dphi, nan, 1.0, 1.0, nan, false};
  if (name == "tanh") return tanh_spec;
  if (name == "sigmoid") return sigmoid_spec;
  if (name == "erf") return erf_spec;
  if (name == "relu") return relu_spec;
  throw InvalidArgument("unknown activation: " + std::string(name));
}

}  // namespace ntkgauss
