#pragma once

// Random number streams and the scalar distributions used by the samplers.
//
// All draws go through explicit inverse-CDF or rejection routines built on a
// std::mt19937_64 engine, so a run is reproducible from its master seed alone.
// Independent named streams let kernel classes (and per-K worker jobs) consume
// randomness without interfering with one another.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include "pfa/errors.hpp"

namespace pfa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::uint64_t fnv1a_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Engine seeded from (master seed, stream name, index). Streams with distinct
// names or indices are effectively independent.
inline std::mt19937_64 make_stream(std::uint64_t master, std::string_view name,
                                   std::uint64_t index = 0) {
  const std::uint64_t h = fnv1a_hash(name);
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1); never returns an endpoint.
inline double uniform01_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Upper tail probability P(Z > x); accurate for large positive x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

inline double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

// Wichura's PPND16 rational approximation of the standard normal quantile.
// Relative error below 1e-15 over (0, 1).
inline double standard_normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw NumericalError("normal quantile: probability outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e+0) *
                    r +
                3.64784832476320460504e+0) *
                   r +
               5.76949722146069140550e+0) *
                  r +
              4.63033784615654529590e+0) *
                 r +
             1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e+0) *
                  r +
              2.05319162663775882187e+0) *
                 r +
             1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e+0) *
                  r +
              5.46378491116411436990e+0) *
                 r +
             6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
  }
  return (q < 0.0) ? -value : value;
}

inline double standard_normal(std::mt19937_64& rng) {
  return standard_normal_quantile(uniform01_open(rng));
}

inline double exponential_sample(std::mt19937_64& rng, double rate) {
  return -std::log(uniform01_open(rng)) / rate;
}

// Marsaglia-Tsang squeeze; shape < 1 handled by boosting.
inline double gamma_sample(std::mt19937_64& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw NumericalError("gamma sample: nonpositive parameter");
  if (shape < 1.0) {
    const double u = uniform01_open(rng);
    return gamma_sample(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

inline double chi_squared_sample(std::mt19937_64& rng, double dof) {
  return gamma_sample(rng, 0.5 * dof, 2.0);
}

namespace detail {

// Standard units past which the CDF-difference inversion loses accuracy and
// we switch to inverting on tail probabilities instead.
inline constexpr double kTruncationTailCut = 5.0;

// Draw Z | a < Z <= b for a > kTruncationTailCut (b may be +inf).
inline double upper_tail_truncated_normal(std::mt19937_64& rng, double a, double b) {
  const double qa = normal_sf(a);
  const double qb = (b == kInf) ? 0.0 : normal_sf(b);
  if (qa > 0.0) {
    const double u = qb + uniform01_open(rng) * (qa - qb);
    if (u > 0.0) return -standard_normal_quantile(u);
  }
  // Tail probability underflowed (~38 standard units); the conditional law is
  // a shifted exponential with rate a to within O(1/a^2).
  if (b == kInf) return a + exponential_sample(rng, a);
  const double w = -std::expm1(-a * (b - a));
  return a - std::log1p(-uniform01_open(rng) * w) / a;
}

}  // namespace detail

// Standard normal truncated to (lo, hi); bounds may be infinite.
inline double truncated_standard_normal(std::mt19937_64& rng, double lo, double hi) {
  if (!(lo < hi)) throw NumericalError("truncated normal: empty interval");
  if (lo == -kInf && hi == kInf) return standard_normal(rng);
  if (lo > detail::kTruncationTailCut) return detail::upper_tail_truncated_normal(rng, lo, hi);
  if (hi < -detail::kTruncationTailCut) return -detail::upper_tail_truncated_normal(rng, -hi, -lo);
  const double pa = (lo == -kInf) ? 0.0 : normal_cdf(lo);
  const double pb = (hi == kInf) ? 1.0 : normal_cdf(hi);
  const double u = pa + uniform01_open(rng) * (pb - pa);
  if (u <= 0.0) return lo;  // interval width below CDF resolution
  if (u >= 1.0) return hi;
  return standard_normal_quantile(u);
}

inline double truncated_normal_sample(std::mt19937_64& rng, double mean, double sd, double lo,
                                      double hi) {
  const double a = (lo == -kInf) ? -kInf : (lo - mean) / sd;
  const double b = (hi == kInf) ? kInf : (hi - mean) / sd;
  return mean + sd * truncated_standard_normal(rng, a, b);
}

}  // namespace pfa
