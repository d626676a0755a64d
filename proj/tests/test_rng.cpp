#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ntkgauss/rng.hpp"

using namespace ntkgauss;

TEST_CASE("streams are deterministic and addressable") {
  RandomStream a(42, "theta0", 3);
  RandomStream b(42, "theta0", 3);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());

  RandomStream c(42, "theta0", 4);
  RandomStream d(42, "theta1", 3);
  RandomStream e(43, "theta0", 3);
  RandomStream base(42, "theta0", 3);
  bool all_equal = true;
  for (int i = 0; i < 16; ++i) {
    const double u = base.uniform();
    all_equal = all_equal && u == c.uniform() && u == d.uniform() && u == e.uniform();
  }
  REQUIRE_FALSE(all_equal);
}

TEST_CASE("uniform draws lie strictly inside (0,1) and have the right moments") {
  RandomStream s(7, "uniform_check");
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // 4-sigma CLT band: sd(mean) = 1/sqrt(12 n).
  REQUIRE(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
  REQUIRE(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal quantile matches reference values") {
  // Reference quantiles from standard tables.
  REQUIRE(std::abs(normal_quantile(0.5)) < 1e-12);
  REQUIRE(normal_quantile(0.975) == Catch::Approx(1.959963984540054).margin(1e-8));
  REQUIRE(normal_quantile(0.025) == Catch::Approx(-1.959963984540054).margin(1e-8));
  REQUIRE(normal_quantile(0.75) == Catch::Approx(0.6744897501960817).margin(1e-8));
  REQUIRE(normal_quantile(0.9999) == Catch::Approx(3.719016485455709).margin(1e-7));
  REQUIRE(normal_quantile(1e-9) == Catch::Approx(-5.997807015008182).margin(1e-6));
  for (double p : {0.01, 0.1, 0.3, 0.7, 0.9, 0.99})
    REQUIRE(normal_quantile(p) ==
            Catch::Approx(-normal_quantile(1.0 - p)).margin(1e-10));
  REQUIRE_THROWS_AS(normal_quantile(0.0), InvalidArgument);
  REQUIRE_THROWS_AS(normal_quantile(1.0), InvalidArgument);
}

TEST_CASE("normal draws have standard moments") {
  RandomStream s(11, "normal_check");
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  REQUIRE(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  REQUIRE(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("derived seeds separate replicas") {
  REQUIRE(derive_seed(1, "a", 0, 0) == derive_seed(1, "a", 0, 0));
  REQUIRE(derive_seed(1, "a", 0, 0) != derive_seed(1, "a", 1, 0));
  REQUIRE(derive_seed(1, "a", 0, 0) != derive_seed(2, "a", 0, 0));
  REQUIRE(derive_seed(1, "a", 0, 0) != derive_seed(1, "b", 0, 0));
}
