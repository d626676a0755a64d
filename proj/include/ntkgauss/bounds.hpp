#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "ntkgauss/activation.hpp"
#include "ntkgauss/errors.hpp"
#include "ntkgauss/network.hpp"

namespace ntkgauss {

/// Everything the hypothesis check and the rate template consume. Norms of
/// the input matrix follow the Frobenius convention throughout.
struct TheoryInputs {
  double norm_x = 0.0;  // ‖X‖_F of the stacked training inputs
  double norm_y = 0.0;
  double sup_phi = 0.0;
  double sup_dphi = 0.0;
  double lip_phi = 0.0;
  double lip_dphi = 0.0;
  double lam_min_inf = 0.0;  // λ_min of the limiting train kernel
  long n0 = 1;
  long n1 = 2;
  long n = 1;
  double r = 5.0;
};

inline TheoryInputs make_theory_inputs(const Dataset& ds, const ActivationSpec& act,
                                       double lam_min_inf, long n1, double r = 5.0) {
  TheoryInputs ti;
  ti.norm_x = ds.x.norm();
  ti.norm_y = ds.y.norm();
  ti.sup_phi = act.sup_phi;
  ti.sup_dphi = act.sup_dphi;
  ti.lip_phi = act.lip_phi;
  ti.lip_dphi = act.lip_dphi;
  ti.lam_min_inf = lam_min_inf;
  ti.n0 = ds.n0();
  ti.n1 = n1;
  ti.n = ds.n();
  ti.r = r;
  return ti;
}

/// Left-hand side of the width hypothesis, exactly as printed:
/// (4‖X‖(√5‖Φ‖∞+‖y‖)/√(n1·n0))·(‖Φ'‖∞ + LipΦ + ‖X‖·LipΦ'·√(r·ln n1)/√n0).
/// The hypothesis holds iff this is < λ_min of the limiting kernel.
inline double assumption_r_lhs(const TheoryInputs& ti) {
  if (ti.r < 5.0)
    throw InvalidR("assumption_r_lhs: r must be >= 5, got " + std::to_string(ti.r));
  if (ti.n1 < 2)
    throw InvalidArgument("assumption_r_lhs: n1 must be >= 2");
  const double n0 = static_cast<double>(ti.n0);
  const double n1 = static_cast<double>(ti.n1);
  const double front = 4.0 * ti.norm_x * (std::sqrt(5.0) * ti.sup_phi + ti.norm_y) /
                       std::sqrt(n1 * n0);
  const double bracket = ti.sup_dphi + ti.lip_phi +
                         ti.norm_x * ti.lip_dphi * std::sqrt(ti.r * std::log(n1)) /
                             std::sqrt(n0);
  return front * bracket;
}

inline bool assumption_r_holds(const TheoryInputs& ti) {
  return assumption_r_lhs(ti) < ti.lam_min_inf;
}

/// Rate template r·(a1·ln n1/(λ³·n1·n0) + a2·n0·(1+t⁸)/(λ^r·n1^{r/4})).
/// a1 and a2 are user-supplied — only their existence is known — so any
/// curve drawn from this is an envelope up to unknown constants.
inline double theorem_rate(const TheoryInputs& ti, double t, double a1, double a2) {
  if (a1 <= 0.0 || a2 <= 0.0)
    throw InvalidArgument("theorem_rate: a1 and a2 must be positive");
  const double n0 = static_cast<double>(ti.n0);
  const double n1 = static_cast<double>(ti.n1);
  const double lam = ti.lam_min_inf;
  const double first = a1 * std::log(n1) / (lam * lam * lam * n1 * n0);
  const double second = a2 * n0 * (1.0 + std::pow(t, 8)) /
                        (std::pow(lam, ti.r) * std::pow(n1, ti.r / 4.0));
  return ti.r * (first + second);
}

struct ActivationNorms {
  double sup_phi, sup_dphi, lip_phi, lip_dphi;
  bool applicable;  // false when the regularity hypotheses are not satisfied
};

/// Audits an activation's declared constants against a dense grid on
/// [-12,12]: grid maxima of |Φ|, |Φ'| and finite-difference slopes must not
/// exceed the declared values. Unbounded activations (relu) are flagged
/// inapplicable and skipped.
inline ActivationNorms activation_norms(const ActivationSpec& act) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (!act.bounded) return {nan, nan, nan, nan, false};
  constexpr int n_points = 12001;
  constexpr double lo = -12.0, hi = 12.0;
  const double h = (hi - lo) / (n_points - 1);
  double max_phi = 0.0, max_dphi = 0.0, max_slope_phi = 0.0, max_slope_dphi = 0.0;
  double prev_phi = act.phi(lo), prev_dphi = act.dphi(lo);
  max_phi = std::abs(prev_phi);
  max_dphi = std::abs(prev_dphi);
  for (int i = 1; i < n_points; ++i) {
    const double z = lo + i * h;
    const double f = act.phi(z), df = act.dphi(z);
    max_phi = std::max(max_phi, std::abs(f));
    max_dphi = std::max(max_dphi, std::abs(df));
    max_slope_phi = std::max(max_slope_phi, std::abs(f - prev_phi) / h);
    max_slope_dphi = std::max(max_slope_dphi, std::abs(df - prev_dphi) / h);
    prev_phi = f;
    prev_dphi = df;
  }
  if (max_phi > act.sup_phi + 1e-9)
    throw NormAuditFailed(act.name + ": grid max |phi| = " + std::to_string(max_phi) +
                              " exceeds declared sup_phi = " + std::to_string(act.sup_phi),
                          "sup_phi");
  if (max_dphi > act.sup_dphi + 1e-9)
    throw NormAuditFailed(act.name + ": grid max |dphi| = " + std::to_string(max_dphi) +
                              " exceeds declared sup_dphi = " + std::to_string(act.sup_dphi),
                          "sup_dphi");
  if (max_slope_phi > act.lip_phi + 1e-6)
    throw NormAuditFailed(act.name + ": grid slope of phi exceeds declared lip_phi",
                          "lip_phi");
  if (max_slope_dphi > act.lip_dphi + 1e-6)
    throw NormAuditFailed(act.name + ": grid slope of dphi exceeds declared lip_dphi",
                          "lip_dphi");
  return {act.sup_phi, act.sup_dphi, act.lip_phi, act.lip_dphi, true};
}

}  // namespace ntkgauss
