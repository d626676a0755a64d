#pragma once

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "ntkgauss/activation.hpp"
#include "ntkgauss/errors.hpp"
#include "ntkgauss/matops.hpp"
#include "ntkgauss/quadrature.hpp"

namespace ntkgauss {

/// Hidden-layer limiting kernel: xᵀx'/n0.
inline double k_tilde(const Vector& x, const Vector& x_prime) {
  if (x.size() != x_prime.size())
    throw InvalidShape("k_tilde: dimension mismatch");
  return x.dot(x_prime) / static_cast<double>(x.size());
}

/// Entries of the 2×2 preactivation covariance of a point pair.
struct CovPair {
  double t11, t12, t22;
};

inline CovPair cov_pair(const Vector& x, const Vector& x_prime) {
  return {k_tilde(x, x), k_tilde(x, x_prime), k_tilde(x_prime, x_prime)};
}

namespace detail {

inline void validate_cov(const CovPair& t) {
  const double scale = std::max({1.0, t.t11, t.t22});
  if (!(std::isfinite(t.t11) && std::isfinite(t.t12) && std::isfinite(t.t22)) ||
      t.t11 < -1e-12 * scale || t.t22 < -1e-12 * scale ||
      t.t12 * t.t12 > t.t11 * t.t22 + 1e-12 * scale * scale)
    throw InvalidCovariance("pair_expectation: (t11,t12,t22)=(" +
                            std::to_string(t.t11) + "," + std::to_string(t.t12) + "," +
                            std::to_string(t.t22) + ") is not a valid covariance");
}

// Shared rule cache; insertion is idempotent, so concurrent builders at the
// same order are harmless.
inline QuadratureRule cached_rule(int order) {
  static std::mutex mutex;
  static std::vector<QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  for (const QuadratureRule& r : cache)
    if (r.order == order) return r;
  cache.push_back(gauss_hermite(order));
  return cache.back();
}

constexpr double kQuadTol = 5e-11;

inline bool quad_converged(double cur, double prev) {
  return std::abs(cur - prev) <= kQuadTol * std::max(1.0, std::abs(cur));
}

// Σᵢ wᵢ·g(a·zᵢ)·g(b·zᵢ): rank-deficient evaluation at one rule order.
template <class G>
double line_sum(G& g, double a, double b, const QuadratureRule& r) {
  double e = 0.0;
  for (int i = 0; i < r.order; ++i)
    e += r.weights[i] * g(a * r.nodes[i]) * g(b * r.nodes[i]);
  return e;
}

// Composite trapezoid against the normal density on [-13.5, 13.5]. For
// bounded analytic integrands this is spectrally accurate in h at any
// argument scale; it backstops the Hermite ladder when the covariance scale
// is large (nodes of a fixed-order rule cannot resolve a saturation layer
// much narrower than their central spacing).
template <class G>
double line_trapezoid(G& g, double a, double b, double h) {
  constexpr double kHalfWidth = 13.5;
  const long n = static_cast<long>(kHalfWidth / h);
  double acc = 0.5 * g(0.0) * g(0.0);  // z = 0 term, half weight doubled below
  for (long k = 1; k <= n; ++k) {
    const double z = h * static_cast<double>(k);
    const double w = std::exp(-0.5 * z * z);
    acc += 0.5 * w * (g(a * z) * g(b * z) + g(-a * z) * g(-b * z));
  }
  return acc * 2.0 * h / std::sqrt(2.0 * M_PI);
}

// One-dimensional expectation E[g(a·Z)·g(b·Z)]: Hermite ladder from the
// requested order, then trapezoid refinement if the ladder has not settled.
template <class G>
double line_integral(G& g, double a, double b, int base_order) {
  double prev = line_sum(g, a, b, cached_rule(base_order));
  for (int order = 2 * base_order; order <= 512; order *= 2) {
    const double cur = line_sum(g, a, b, cached_rule(order));
    if (quad_converged(cur, prev)) return cur;
    prev = cur;
  }
  for (double h : {0.02, 0.01, 0.005, 0.0025}) {
    const double cur = line_trapezoid(g, a, b, h);
    if (quad_converged(cur, prev)) return cur;
    prev = cur;
  }
  return prev;
}

// Full tensor sum over the Cholesky factor (l11, l21, l22).
template <class G>
double tensor_sum(G& g, double l11, double l21, double l22,
                  const QuadratureRule& r) {
  double e = 0.0;
  for (int i = 0; i < r.order; ++i) {
    const double base = l21 * r.nodes[i];
    double inner = 0.0;
    for (int j = 0; j < r.order; ++j)
      inner += r.weights[j] * g(base + l22 * r.nodes[j]);
    e += r.weights[i] * g(l11 * r.nodes[i]) * inner;
  }
  return e;
}

// Two-dimensional expectation: tensor ladder doubling from the requested
// order. A fixed 64-node rule is not converged for saturating activations
// once the covariance scale passes ~1, so the requested order is a floor,
// not the final resolution.
template <class G>
double tensor_integral(G& g, double l11, double l21, double l22, int base_order) {
  double prev = tensor_sum(g, l11, l21, l22, cached_rule(base_order));
  for (int order = 2 * base_order; order <= 1024; order *= 2) {
    const double cur = tensor_sum(g, l11, l21, l22, cached_rule(order));
    if (quad_converged(cur, prev)) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace detail

/// E[g(u)g(v)] for (u,v) ~ N(0,T) by tensorized quadrature on the Cholesky
/// factor of T, refined internally until converged. Rank-deficient T uses
/// the exact rank-1 (or rank-0) factor — the x'=0 and x'=x cases must come
/// out exact, so no jitter here. For 1D inputs every pair covariance is
/// rank-1, which keeps Gram assembly at one axis worth of nodes per pair.
template <class G>
double pair_expectation(G&& g, const CovPair& t, const QuadratureRule& rule) {
  detail::validate_cov(t);
  const double t11 = std::max(t.t11, 0.0);
  const double t22 = std::max(t.t22, 0.0);

  if (t11 == 0.0 && t22 == 0.0) {
    const double g0 = g(0.0);
    return g0 * g0;
  }
  if (t11 == 0.0)  // u degenerate at zero, v ~ N(0, t22)
    return detail::line_integral(g, 0.0, std::sqrt(t22), rule.order);

  const double l11 = std::sqrt(t11);
  const double l21 = t.t12 / l11;
  const double s2 = t22 - l21 * l21;
  if (s2 <= 1e-14 * t22)  // v is an exact linear image of u
    return detail::line_integral(g, l11, l21, rule.order);
  return detail::tensor_integral(g, l11, l21, std::sqrt(s2), rule.order);
}

/// Infinite-width network covariance K(x,x') = E[Φ(u)Φ(v)].
inline double nngp_K(const Vector& x, const Vector& x_prime,
                     const ActivationSpec& act, const QuadratureRule& rule) {
  return pair_expectation(act.phi, cov_pair(x, x_prime), rule);
}

/// Limiting tangent kernel k∞(x,x') = K(x,x') + K̃(x,x')·E[Φ'(u)Φ'(v)].
inline double ntk_limit(const Vector& x, const Vector& x_prime,
                        const ActivationSpec& act, const QuadratureRule& rule) {
  const CovPair t = cov_pair(x, x_prime);
  return pair_expectation(act.phi, t, rule) +
         t.t12 * pair_expectation(act.dphi, t, rule);
}

enum class KernelKind { nngp, ntk_limit, k_tilde };

/// Pairwise Gram matrix over a point set (columns). Each unordered pair is
/// evaluated once and mirrored, so the result is exactly symmetric.
inline SymMatrix gram(const Matrix& points, KernelKind kind,
                      const ActivationSpec& act, const QuadratureRule& rule) {
  const Index m = points.cols();
  Matrix g(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      double v;
      switch (kind) {
        case KernelKind::nngp:
          v = nngp_K(points.col(i), points.col(j), act, rule);
          break;
        case KernelKind::ntk_limit:
          v = ntk_limit(points.col(i), points.col(j), act, rule);
          break;
        case KernelKind::k_tilde:
          v = k_tilde(points.col(i), points.col(j));
          break;
      }
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return SymMatrix(g);
}

struct PdReport {
  bool pd;
  double min_eig;
};

/// Positive-definiteness check used for the limiting-kernel hypothesis.
inline PdReport check_pd(const SymMatrix& g, double tol) {
  const double lam = min_eig(g);
  return {lam > tol, lam};
}

/// NNGP and limiting-NTK blocks for a pair of point sets, sharing the
/// per-pair covariance and quadrature work (one pass computes both
/// expectations) — the Gram-assembly cache the bigger builds rely on.
struct KernelBlocks {
  Matrix nngp;  // |A| × |B|
  Matrix ntk;   // |A| × |B|
};

inline KernelBlocks kernel_blocks(const Matrix& a, const Matrix& b,
                                  const ActivationSpec& act,
                                  const QuadratureRule& rule) {
  if (a.rows() != b.rows())
    throw InvalidShape("kernel_blocks: point dimension mismatch");
  const bool same = &a == &b;
  KernelBlocks out{Matrix(a.cols(), b.cols()), Matrix(a.cols(), b.cols())};
  for (Index i = 0; i < a.cols(); ++i) {
    const Index j0 = same ? i : 0;
    for (Index j = j0; j < b.cols(); ++j) {
      const CovPair t = cov_pair(a.col(i), b.col(j));
      const double kk = pair_expectation(act.phi, t, rule);
      const double kinf = kk + t.t12 * pair_expectation(act.dphi, t, rule);
      out.nngp(i, j) = kk;
      out.ntk(i, j) = kinf;
      if (same) {
        out.nngp(j, i) = kk;
        out.ntk(j, i) = kinf;
      }
    }
  }
  return out;
}

}  // namespace ntkgauss
