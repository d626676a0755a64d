#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ntkgauss/errors.hpp"
#include "ntkgauss/kernels.hpp"
#include "ntkgauss/matops.hpp"
#include "ntkgauss/network.hpp"
#include "ntkgauss/rng.hpp"

namespace ntkgauss {

/// Mean and covariance of the time-indexed limiting process on a test set.
struct GpMoments {
  Vector mean;
  SymMatrix cov;
  double time;
  Matrix test_points;          // columns
  std::uint64_t kernel_hash;   // provenance of the kernel configuration
};

/// Gram blocks shared by every time evaluation on the same (test set,
/// dataset, activation, rule): the train-kernel eigendecomposition is done
/// once and I_t reuses it across a whole time sweep.
struct GpContext {
  Matrix test_points;
  Vector y;
  Matrix k_test;       // m × m NNGP
  Matrix k_cross;      // m × n NNGP
  Matrix kinf_cross;   // m × n limiting NTK
  Matrix k_train;      // n × n NNGP
  SymMatrix kinf_train;
  EigDecomp kinf_eig;
  std::uint64_t kernel_hash;
};

inline GpContext make_gp_context(const Matrix& test_points, const Dataset& ds,
                                 const ActivationSpec& act,
                                 const QuadratureRule& rule) {
  if (test_points.rows() != ds.x.rows())
    throw InvalidShape("gp context: test point dimension does not match dataset");
  const KernelBlocks cross = kernel_blocks(test_points, ds.x, act, rule);
  const KernelBlocks train = kernel_blocks(ds.x, ds.x, act, rule);
  const KernelBlocks test = kernel_blocks(test_points, test_points, act, rule);
  SymMatrix kinf_train(0.5 * (train.ntk + train.ntk.transpose().eval()));
  EigDecomp eig = sym_eig(kinf_train);
  std::uint64_t h = detail::fnv1a64(act.name);
  h = detail::fnv1a64_mix(h, static_cast<std::uint64_t>(rule.order));
  h = detail::fnv1a64_mix(h, static_cast<std::uint64_t>(ds.n()));
  h = detail::fnv1a64_mix(h, static_cast<std::uint64_t>(test_points.cols()));
  return GpContext{test_points,
                   ds.y,
                   0.5 * (test.nngp + test.nngp.transpose().eval()),
                   cross.nngp,
                   cross.ntk,
                   0.5 * (train.nngp + train.nngp.transpose().eval()),
                   std::move(kinf_train),
                   std::move(eig),
                   h};
}

/// Moments of the process at time t:
///   μ_t = k∞(x,X)·I_t(k∞)·y
///   Σ_t = K(x,x') - K(x,X)·I_t·k∞(X,x') - k∞(x,X)·I_t·K(X,x')
///         + k∞(x,X)·I_t·K(X,X)·I_t·k∞(X,x').
/// The two cross terms are transposes of each other, which the assembly
/// enforces to cut roundoff asymmetry. For t > 0 the train kernel must be
/// positive definite (the t = 0 moments need no inverse-like object).
inline GpMoments gp_moments(const GpContext& ctx, double t) {
  if (t < 0.0) throw InvalidTime("gp_moments: t must be nonnegative");
  if (t > 0.0) {
    const double lam = ctx.kinf_eig.eigenvalues[0];
    if (!(lam > 1e-10))
      throw KernelDegenerate(
          "gp_moments: limiting train kernel is not positive definite (min eig " +
              std::to_string(lam) + ")",
          lam);
  }
  const Matrix it = i_t(ctx.kinf_eig, t);
  const Vector mean = ctx.kinf_cross * (it * ctx.y);
  const Matrix m = ctx.kinf_cross * it;                     // m × n
  const Matrix cross = ctx.k_cross * m.transpose();         // K(x,X)·I_t·k∞(X,x')
  Matrix cov = ctx.k_test - cross - cross.transpose() + m * ctx.k_train * m.transpose();
  cov = 0.5 * (cov + cov.transpose().eval());
  // Tiny negative diagonal is roundoff and is clamped; anything bigger
  // indicates a kernel bug and must surface.
  const double floor = -1e-10 * std::max(1.0, cov.trace());
  for (Index i = 0; i < cov.rows(); ++i) {
    if (cov(i, i) < floor)
      throw NotPSD("gp_moments: covariance diagonal " + std::to_string(cov(i, i)) +
                   " below roundoff floor at index " + std::to_string(i));
    if (cov(i, i) < 0.0) cov(i, i) = 0.0;
  }
  return GpMoments{mean, SymMatrix(cov), t, ctx.test_points, ctx.kernel_hash};
}

inline GpMoments gp_moments(const Matrix& test_points, const Dataset& ds,
                            const ActivationSpec& act, const QuadratureRule& rule,
                            double t) {
  return gp_moments(make_gp_context(test_points, ds, act, rule), t);
}

/// Draw `count` joint samples (rows) of the process: μ + L·z with
/// L·Lᵀ = Σ + ε·I from the jitter ladder and z from the seeded stream.
inline Matrix sample_gp(const GpMoments& m, long count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("sample_gp: count must be >= 1");
  const CholResult chol = chol_jitter(m.cov);
  const Index dim = m.mean.size();
  Matrix out(count, dim);
  RandomStream stream(seed, "gp_sample");
  Vector z(dim);
  for (long k = 0; k < count; ++k) {
    for (Index i = 0; i < dim; ++i) z[i] = stream.normal();
    out.row(k) = (m.mean + chol.lower * z).transpose();
  }
  return out;
}

struct Band {
  Vector lo;
  Vector hi;
};

/// Central band at the given level: μᵢ ± z_{(1+level)/2}·√Σᵢᵢ.
inline Band gp_band(const GpMoments& m, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw InvalidArgument("gp_band: level must lie in (0,1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  Band band{Vector(m.mean.size()), Vector(m.mean.size())};
  for (Index i = 0; i < m.mean.size(); ++i) {
    const double sd = std::sqrt(std::max(m.cov(i, i), 0.0));
    band.lo[i] = m.mean[i] - z * sd;
    band.hi[i] = m.mean[i] + z * sd;
  }
  return band;
}

}  // namespace ntkgauss
