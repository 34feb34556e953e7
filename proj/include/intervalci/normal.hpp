#pragma once

// Univariate and bivariate standard normal primitives. Everything here is
// pure and thread-safe; extended reals (+-inf) are accepted wherever a bound
// or limit parameter makes sense.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "intervalci/errors.hpp"

namespace intervalci {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A probability. Validates [0,1] on construction.
class Prob {
 public:
  Prob(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw DomainError("probability must lie in [0, 1], got " + std::to_string(v));
  }
  operator double() const noexcept { return v_; }
  double value() const noexcept { return v_; }

 private:
  double v_;
};

/// A correlation coefficient. Validates [-1,1] on construction.
class Corr {
 public:
  Corr(double v) : v_(v) {
    if (!(v >= -1.0 && v <= 1.0))
      throw DomainError("correlation must lie in [-1, 1], got " + std::to_string(v));
  }
  operator double() const noexcept { return v_; }
  double value() const noexcept { return v_; }

 private:
  double v_;
};

/// Standard normal density. Input must be finite.
inline double phi(double x) {
  if (!std::isfinite(x)) throw DomainError("phi: input must be finite");
  static constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace detail {

// Unchecked density, for hot paths that already validated their inputs.
inline double phi_raw(double x) {
  static constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace detail

/// Standard normal CDF. Accepts +-inf. Evaluated through erfc on the
/// shorter tail so that relative accuracy is preserved for x << 0 and
/// absolute accuracy everywhere.
inline double norm_cdf(double x) {
  if (std::isnan(x)) throw DomainError("norm_cdf: NaN input");
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  static constexpr double inv_sqrt2 = 0.7071067811865475244008444;
  if (x <= 0.0) return 0.5 * std::erfc(-x * inv_sqrt2);
  return 1.0 - 0.5 * std::erfc(x * inv_sqrt2);
}

/// Upper tail 1 - Phi(x), with relative accuracy for x >> 0.
inline double norm_sf(double x) { return norm_cdf(-x); }

/// Standard normal quantile. quantile(0) = -inf, quantile(1) = +inf.
/// Rational initial estimate refined by Halley steps against norm_cdf;
/// round-trip |norm_cdf(quantile(p)) - p| is at machine-precision level
/// over [1e-300, 1 - 1e-16].
inline double norm_quantile(Prob p) {
  const double pv = p;
  if (pv == 0.0) return -kInf;
  if (pv == 1.0) return kInf;

  // Acklam's rational approximation, |relative error| < 1.15e-9.
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
  static constexpr double p_low = 0.02425;

  double x;
  if (pv < p_low) {
    double q = std::sqrt(-2.0 * std::log(pv));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (pv <= 1.0 - p_low) {
    double q = pv - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-pv));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement, f(x) = Phi(x) - p.
  for (int it = 0; it < 2; ++it) {
    double dens = detail::phi_raw(x);
    if (dens <= 0.0) break;
    double e = norm_cdf(x) - pv;
    double u = e / dens;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace detail {

// Bivariate normal upper orthant P(X > h, Y > k) for standard margins with
// correlation r. Gauss-Legendre integration over the correlation parameter
// after Drezner & Wesolowsky, with the split quadrature order and the
// |r| > 0.925 asymptotic treatment published by Genz. Absolute error is
// below 5e-16 away from |r| = 1; exact degenerate forms are used within
// 1e-12 of |r| = 1.
inline double bvn_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : norm_cdf(-k);
  if (k == -kInf) return norm_cdf(-h);

  if (std::abs(r) >= 1.0 - 1e-12) {
    if (r > 0.0) return norm_cdf(-std::max(h, k));        // Y = X
    return std::max(0.0, norm_cdf(-k) - norm_cdf(h));     // Y = -X
  }
  if (r == 0.0) return norm_cdf(-h) * norm_cdf(-k);

  static constexpr double w6[3] = {0.1713244923791704, 0.3607615730481386,
                                   0.4679139345726910};
  static constexpr double x6[3] = {0.9324695142031521, 0.6612093864662645,
                                   0.2386191860831969};
  static constexpr double w12[6] = {0.04717533638651183, 0.1069393259953184,
                                    0.1600783285433462,  0.2031674267230659,
                                    0.2334925365383548,  0.2491470458134028};
  static constexpr double x12[6] = {0.9815606342467192, 0.9041172563704749,
                                    0.7699026741943047, 0.5873179542866175,
                                    0.3678314989981802, 0.1252334085114689};
  static constexpr double w20[10] = {0.01761400713915212, 0.04060142980038694,
                                     0.06267204833410907, 0.08327674157670475,
                                     0.1019301198172404,  0.1181945319615184,
                                     0.1316886384491766,  0.1420961093183820,
                                     0.1491729864726037,  0.1527533871307258};
  static constexpr double x20[10] = {0.9931285991850949,  0.9639719272779138,
                                     0.9122344282513259,  0.8391169718222188,
                                     0.7463319064601508,  0.6360536807265150,
                                     0.5108670019508271,  0.3737060887154195,
                                     0.2277858511416451,  0.07652652113349733};

  const double* w = w20;
  const double* xg = x20;
  int ng = 10;
  double ar = std::abs(r);
  if (ar < 0.3) {
    w = w6; xg = x6; ng = 3;
  } else if (ar < 0.75) {
    w = w12; xg = x12; ng = 6;
  }

  constexpr double twopi = 6.283185307179586476925287;
  double hk = h * k;
  double bvn = 0.0;

  if (ar < 0.925) {
    double hs = 0.5 * (h * h + k * k);
    double asr = std::asin(r);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        double sn = std::sin(0.5 * asr * (is * xg[i] + 1.0));
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * twopi) + norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    {
      double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      double bs = (h - k) * (h - k);
      double cc = (4.0 - hk) / 8.0;
      double dd = (12.0 - hk) / 16.0;
      double asr = -0.5 * (bs / as + hk);
      if (asr > -100.0)
        bvn = a * std::exp(asr) *
              (1.0 - cc * (bs - as) * (1.0 - dd * bs / 5.0) / 3.0 + cc * dd * as * as / 5.0);
      if (-hk < 100.0) {
        double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(twopi) * norm_cdf(-b / a) * b *
               (1.0 - cc * bs * (1.0 - dd * bs / 5.0) / 3.0);
      }
      a *= 0.5;
      for (int i = 0; i < ng; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          double xs = a * (is * xg[i] + 1.0);
          xs *= xs;
          double rs = std::sqrt(1.0 - xs);
          double asr1 = -0.5 * (bs / xs + hk);
          if (asr1 > -100.0)
            bvn += a * w[i] * std::exp(asr1) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                    (1.0 + cc * xs * (1.0 + dd * xs)));
        }
      }
      bvn = -bvn / twopi;
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) {
        if (h < 0.0)
          bvn += norm_cdf(k) - norm_cdf(h);
        else
          bvn += norm_cdf(-h) - norm_cdf(-k);
      }
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

// P(U >= a, V <= b) for standard bivariate normal with correlation rho.
// The CI constraint events reduce to this half-plane intersection.
inline double bvn_ge_le(double a, double b, double rho) {
  // (U, -V) has correlation -rho.
  return bvn_upper(a, -b, -rho);
}

}  // namespace detail

/// P(a_lo <= U <= a_hi, b_lo <= V <= b_hi) for standard bivariate normal
/// (U, V) with correlation rho. Bounds may be +-inf. Within 1e-12 of
/// |rho| = 1 the degenerate one-dimensional law is used instead of
/// quadrature.
inline Prob bvn_rect(double a_lo, double a_hi, double b_lo, double b_hi, Corr rho) {
  if (std::isnan(a_lo) || std::isnan(a_hi) || std::isnan(b_lo) || std::isnan(b_hi))
    throw DomainError("bvn_rect: NaN bound");
  if (!(a_lo <= a_hi) || !(b_lo <= b_hi))
    throw DomainError("bvn_rect: inverted bounds");

  const double r = rho;
  if (std::abs(r) >= 1.0 - 1e-12) {
    double lo, hi;
    if (r > 0.0) {  // V = U
      lo = std::max(a_lo, b_lo);
      hi = std::min(a_hi, b_hi);
    } else {  // V = -U
      lo = std::max(a_lo, -b_hi);
      hi = std::min(a_hi, -b_lo);
    }
    if (lo >= hi) return 0.0;
    return std::clamp(norm_cdf(hi) - norm_cdf(lo), 0.0, 1.0);
  }

  // Inclusion-exclusion over four lower orthants, L(x, y) = P(U <= x, V <= y).
  auto L = [r](double x, double y) { return detail::bvn_upper(-x, -y, r); };
  double p = L(a_hi, b_hi) - L(a_lo, b_hi) - L(a_hi, b_lo) + L(a_lo, b_lo);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace intervalci
