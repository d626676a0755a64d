#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "ntkgauss/errors.hpp"

namespace ntkgauss {

namespace detail {

// Philox4x32-10 counter-based generator (Salmon et al.). A block is a pure
// function of (key, counter), so streams keyed by (seed, tag, subscripts)
// never overlap and replicas may be generated in any order.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

/// Standard-normal quantile (inverse CDF). Acklam's rational approximation
/// followed by one Halley step against erfc; absolute error well below 1e-9
/// over (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidArgument("normal_quantile: p must lie in (0,1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

/// Deterministic stream of uniforms/normals addressed by
/// (seed, tag, subscript_a, subscript_b). Counter-based: the i-th draw of a
/// stream is a pure function of the address and i.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0,
               std::uint64_t b = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {
    std::uint64_t s = detail::fnv1a64(tag);
    s = detail::fnv1a64_mix(s, a);
    s = detail::fnv1a64_mix(s, b);
    stream_lo_ = static_cast<std::uint32_t>(s);
    stream_hi_ = static_cast<std::uint32_t>(s >> 32);
  }

  /// Uniform draw in the open interval (0,1).
  double uniform() {
    const std::uint64_t i = index_++;
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(i >> 1), static_cast<std::uint32_t>(i >> 33),
        stream_lo_, stream_hi_};
    const auto block = detail::philox4x32(ctr, key_);
    const int half = static_cast<int>(i & 1u);
    const std::uint32_t hi = block[2 * half];
    const std::uint32_t lo = block[2 * half + 1];
    // 26 + 27 = 53 random bits, offset by half an ulp so the result is
    // strictly inside (0,1).
    const double v = static_cast<double>(hi >> 6) * 134217728.0 +
                     static_cast<double>(lo >> 5) + 0.5;
    return v * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by inverse-CDF; one uniform per draw.
  double normal() { return normal_quantile(uniform()); }

private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t index_ = 0;
};

/// Stable 64-bit mix of (seed, tag, subscripts); used to derive child seeds
/// for replicas so that parallel completion order cannot change results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = detail::fnv1a64(tag);
  h = detail::fnv1a64_mix(h, seed);
  h = detail::fnv1a64_mix(h, a);
  h = detail::fnv1a64_mix(h, b);
  return h;
}

}  // namespace ntkgauss
