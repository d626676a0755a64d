#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ntkgauss/bounds.hpp"
#include "ntkgauss/kernels.hpp"

using namespace ntkgauss;

namespace {

TheoryInputs tanh_inputs(long n1) {
  TheoryInputs ti;
  const ActivationSpec& act = activation("tanh");
  ti.norm_x = 3.0;
  ti.norm_y = 1.2;
  ti.sup_phi = act.sup_phi;
  ti.sup_dphi = act.sup_dphi;
  ti.lip_phi = act.lip_phi;
  ti.lip_dphi = act.lip_dphi;
  ti.lam_min_inf = 0.5;
  ti.n0 = 1;
  ti.n1 = n1;
  ti.n = 2;
  ti.r = 5.0;
  return ti;
}

}  // namespace

TEST_CASE("assumption_r_lhs: width scaling, zero data, r validation") {
  const TheoryInputs ti = tanh_inputs(1024);
  TheoryInputs ti4 = tanh_inputs(4 * 1024);
  // Quadrupling the width shrinks the LHS by at least 1.9 (the 1/√n1 factor
  // beats the √log growth).
  REQUIRE(assumption_r_lhs(ti4) < assumption_r_lhs(ti) / 1.9);

  TheoryInputs empty = ti;
  empty.norm_x = 0.0;
  REQUIRE(assumption_r_lhs(empty) == 0.0);

  TheoryInputs bad_r = ti;
  bad_r.r = 4.0;
  REQUIRE_THROWS_AS(assumption_r_lhs(bad_r), InvalidR);
  TheoryInputs thin = ti;
  thin.n1 = 1;
  REQUIRE_THROWS_AS(assumption_r_lhs(thin), InvalidArgument);
}

TEST_CASE("assumption check composes with the limiting kernel on a real dataset") {
  const ActivationSpec& act = activation("tanh");
  const QuadratureRule rule = gauss_hermite(64);
  Dataset ds;
  ds.x.resize(1, 2);
  ds.x << -7.0, 4.0;  // two points on [-10, 10]
  ds.y.resize(2);
  ds.y << std::sin(-7.0), std::sin(4.0);
  const double lam = min_eig(gram(ds.x, KernelKind::ntk_limit, act, rule));
  REQUIRE(lam > 0.0);
  long n1 = 2;
  while (!assumption_r_holds(make_theory_inputs(ds, act, lam, n1))) {
    n1 *= 2;
    REQUIRE(n1 < (1L << 40));
  }
  // The hypothesis holds from some finite width on, and fails below it.
  REQUIRE(assumption_r_holds(make_theory_inputs(ds, act, lam, n1)));
  if (n1 > 2)
    REQUIRE_FALSE(assumption_r_holds(make_theory_inputs(ds, act, lam, n1 / 2)));
}

TEST_CASE("property: the LHS has the exact (log n1 / n1)^1/2 profile") {
  // LHS(n1)·√(n1/log n1) is constant in n1 once the log-free part is removed;
  // check the two-term structure by eliminating it explicitly.
  const TheoryInputs a = tanh_inputs(64);
  const TheoryInputs b = tanh_inputs(4096);
  const double front_a = 4.0 * a.norm_x * (std::sqrt(5.0) * a.sup_phi + a.norm_y) /
                         std::sqrt(static_cast<double>(a.n1));
  const double front_b = 4.0 * b.norm_x * (std::sqrt(5.0) * b.sup_phi + b.norm_y) /
                         std::sqrt(static_cast<double>(b.n1));
  const double log_part_a = (assumption_r_lhs(a) / front_a - a.sup_dphi - a.lip_phi) /
                            std::sqrt(std::log(static_cast<double>(a.n1)));
  const double log_part_b = (assumption_r_lhs(b) / front_b - b.sup_dphi - b.lip_phi) /
                            std::sqrt(std::log(static_cast<double>(b.n1)));
  REQUIRE(log_part_a == Catch::Approx(log_part_b).epsilon(1e-12));
}

TEST_CASE("theorem_rate: direct arithmetic evaluation and monotonicity") {
  TheoryInputs ti = tanh_inputs(10000);
  ti.lam_min_inf = 1.0;
  ti.n0 = 1;
  // r·(a1·ln(1e4)/1e4 + a2·1e-5) with r=5, evaluated independently.
  const double expected = 5.0 * (std::log(1e4) / 1e4 + 1e-5);
  REQUIRE(theorem_rate(ti, 0.0, 1.0, 1.0) == Catch::Approx(expected).epsilon(1e-12));
  REQUIRE(expected == Catch::Approx(4.66e-3).margin(1e-5));

  // Doubling n1 at large n1 roughly halves the first term.
  TheoryInputs t2 = ti;
  t2.n1 = 20000;
  const double r1 = theorem_rate(ti, 0.0, 1.0, 1.0);
  const double r2 = theorem_rate(t2, 0.0, 1.0, 1.0);
  REQUIRE(r2 < 0.6 * r1);
  REQUIRE(r2 > 0.4 * r1);

  for (double t : {0.0, 0.5, 1.0, 2.0})
    REQUIRE(theorem_rate(ti, t + 0.5, 1.0, 1.0) >= theorem_rate(ti, t, 1.0, 1.0));
  REQUIRE(theorem_rate(ti, 1.0, 2.0, 1.0) > theorem_rate(ti, 1.0, 1.0, 1.0));
  REQUIRE(theorem_rate(ti, 1.0, 1.0, 2.0) > theorem_rate(ti, 1.0, 1.0, 1.0));
  REQUIRE_THROWS_AS(theorem_rate(ti, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("activation_norms: audited constants and the relu flag") {
  const ActivationNorms tanh_norms = activation_norms(activation("tanh"));
  REQUIRE(tanh_norms.applicable);
  REQUIRE(tanh_norms.sup_phi == 1.0);
  REQUIRE(tanh_norms.sup_dphi == 1.0);
  REQUIRE(tanh_norms.lip_phi == 1.0);
  // max|tanh''| = 4/(3√3) ≈ 0.7699, attained near z ≈ 0.6585.
  REQUIRE(tanh_norms.lip_dphi == Catch::Approx(0.7699).margin(1e-4));

  const ActivationNorms sig = activation_norms(activation("sigmoid"));
  REQUIRE(sig.sup_phi == 1.0);
  REQUIRE(sig.sup_dphi == 0.25);

  const ActivationNorms erf_norms = activation_norms(activation("erf"));
  REQUIRE(erf_norms.sup_dphi == Catch::Approx(2.0 / std::sqrt(M_PI)));

  const ActivationNorms relu_norms = activation_norms(activation("relu"));
  REQUIRE_FALSE(relu_norms.applicable);
}

TEST_CASE("activation_norms audit catches a wrong declaration") {
  ActivationSpec lying = activation("tanh");
  lying.sup_dphi = 0.5;  // true sup is 1
  try {
    activation_norms(lying);
    FAIL("audit should have rejected the declared sup_dphi");
  } catch (const NormAuditFailed& e) {
    REQUIRE(e.constant == "sup_dphi");
  }
}

TEST_CASE("declared Lipschitz constants are tight against a grid maximization") {
  // Grid maxima should approach (from below) the declared suprema.
  for (const char* name : {"tanh", "sigmoid", "erf"}) {
    const ActivationSpec& act = activation(name);
    double max_slope_dphi = 0.0, max_dphi = 0.0;
    for (int i = 0; i < 24000; ++i) {
      const double z = -12.0 + i * 1e-3;
      max_dphi = std::max(max_dphi, std::abs(act.dphi(z)));
      max_slope_dphi = std::max(
          max_slope_dphi, std::abs(act.dphi(z + 1e-3) - act.dphi(z)) / 1e-3);
    }
    REQUIRE(max_dphi <= act.sup_dphi + 1e-9);
    REQUIRE(max_dphi > act.sup_dphi - 1e-4);
    REQUIRE(max_slope_dphi <= act.lip_dphi + 1e-6);
    REQUIRE(max_slope_dphi > act.lip_dphi - 1e-4);
  }
}
