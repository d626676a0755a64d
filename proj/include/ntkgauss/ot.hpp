#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ntkgauss/errors.hpp"
#include "ntkgauss/matops.hpp"

namespace ntkgauss {

/// Equal-weight empirical distribution: one sample per row.
struct EmpiricalDist {
  Matrix samples;  // count × d
  std::uint64_t seed = 0;

  Index count() const { return samples.rows(); }
  Index dim() const { return samples.cols(); }

  static EmpiricalDist from_vector(const Vector& v, std::uint64_t seed = 0) {
    EmpiricalDist d;
    d.samples = v;
    d.seed = seed;
    return d;
  }
};

namespace detail {

inline void check_pair(const EmpiricalDist& a, const EmpiricalDist& b,
                       const char* where) {
  if (a.count() == 0 || b.count() == 0)
    throw EmptyDist(std::string(where) + ": empty distribution");
  if (a.dim() != b.dim())
    throw InvalidShape(std::string(where) + ": dimension mismatch");
  if (a.count() != b.count())
    throw UnequalSupport(std::string(where) + ": sample counts differ (" +
                         std::to_string(a.count()) + " vs " +
                         std::to_string(b.count()) + ")");
}

// Exact linear assignment (Kuhn–Munkres with potentials, O(n³)).
// Returns the minimal total cost over permutations.
inline double hungarian_min_cost(const Matrix& cost) {
  const Index n = cost.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (Index j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

}  // namespace detail

/// Exact 1D quadratic Wasserstein distance between equal-count empiricals:
/// the monotone (sorted) coupling is optimal on the line, so this is the
/// RMS gap of order statistics.
inline double w2_1d(const EmpiricalDist& a, const EmpiricalDist& b) {
  detail::check_pair(a, b, "w2_1d");
  if (a.dim() != 1) throw InvalidShape("w2_1d: distributions must be 1-dimensional");
  std::vector<double> sa(a.samples.data(), a.samples.data() + a.count());
  std::vector<double> sb(b.samples.data(), b.samples.data() + b.count());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(sa.size()));
}

/// Exact W2 in R^d by optimal assignment over the squared-cost matrix.
/// Cubic in the support size, hence the cap.
inline double w2_assign(const EmpiricalDist& a, const EmpiricalDist& b) {
  detail::check_pair(a, b, "w2_assign");
  const Index n = a.count();
  if (n > 512)
    throw TooLarge("w2_assign: support size " + std::to_string(n) +
                   " exceeds the 512 cap of the cubic assignment solver");
  Matrix cost(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      cost(i, j) = (a.samples.row(i) - b.samples.row(j)).squaredNorm();
  return std::sqrt(detail::hungarian_min_cost(cost) / static_cast<double>(n));
}

/// Closed-form W2 between 1D Gaussians: √((μ₁-μ₂)² + (σ₁-σ₂)²). Test oracle.
inline double gaussian_w2(double mu1, double sd1, double mu2, double sd2) {
  if (sd1 < 0.0 || sd2 < 0.0)
    throw InvalidArgument("gaussian_w2: standard deviations must be nonnegative");
  return std::hypot(mu1 - mu2, sd1 - sd2);
}

/// Sample budget that keeps the W2 estimate noise-free at width n1:
/// 10·(n1/ln n1)², the "much greater than" margin fixed at a factor of 10.
inline double min_samples_rule(double n1) {
  const double r = n1 / std::log(n1);
  return 10.0 * r * r;
}

inline long min_samples_for_width(long n1) {
  if (n1 < 2) throw InvalidArgument("min_samples_for_width: width must be >= 2");
  return static_cast<long>(std::ceil(min_samples_rule(static_cast<double>(n1))));
}

/// Inversion of the bare boundary (w/ln w)² ≤ N: the largest width for
/// which an N-sample W2 estimate still makes sense. At N = 10⁴ this lands
/// near 650.
inline long max_width_for_samples(long n) {
  if (n < 1) throw InvalidArgument("max_width_for_samples: sample count must be >= 1");
  auto admissible = [n](long w) {
    const double r = static_cast<double>(w) / std::log(static_cast<double>(w));
    return r * r <= static_cast<double>(n);
  };
  if (!admissible(3)) {
    if (admissible(2)) return 2;
    throw InvalidArgument("max_width_for_samples: no admissible width for N = " +
                          std::to_string(n));
  }
  long lo = 3, hi = 4;
  while (admissible(hi)) {
    lo = hi;
    if (hi > (1L << 60)) break;
    hi *= 2;
  }
  while (lo + 1 < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (admissible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace ntkgauss
