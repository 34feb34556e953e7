#pragma once

// Bracketed scalar root finding used by the critical-value solvers.

#include <cmath>
#include <string>

#include "intervalci/errors.hpp"

namespace intervalci {

struct RootResult {
  double x = 0.0;       // located root
  double f = 0.0;       // residual at x
  int iterations = 0;
  bool converged = false;
};

/// Brent's method on [a, b]. Requires f(a) and f(b) of opposite sign (a zero
/// endpoint counts). Deterministic; stops when the bracket shrinks below
/// xtol or |f| falls below ftol.
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      double xtol = 1e-13, double ftol = 0.0, int max_iter = 200) {
  if (fa == 0.0) return {a, 0.0, 0, true};
  if (fb == 0.0) return {b, 0.0, 0, true};
  if (fa * fb > 0.0)
    throw SolverError("brent_root: endpoints do not bracket a root (f(a)=" +
                      std::to_string(fa) + ", f(b)=" + std::to_string(fb) + ")");

  double c = a, fc = fa;
  double d = b - a, e = d;
  RootResult out;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * xtol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= ftol) {
      out.x = b; out.f = fb; out.iterations = iter; out.converged = true;
      return out;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double q1 = fa / fc, r1 = fb / fc;
        p = s * (2.0 * xm * q1 * (q1 - r1) - (b - a) * (r1 - 1.0));
        q = (q1 - 1.0) * (r1 - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  out.x = b; out.f = fb; out.iterations = max_iter; out.converged = false;
  return out;
}

/// Newton iteration safeguarded by a maintained bracket [lo, hi] with
/// f(lo) <= 0 <= f(hi) (f increasing). Falls back to bisection whenever the
/// Newton step leaves the bracket or stalls.
template <class FDF>
RootResult newton_bisect(FDF&& fdf, double lo, double hi, double x0,
                         double xtol = 1e-13, int max_iter = 100) {
  double x = x0;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  RootResult out;
  for (int iter = 0; iter < max_iter; ++iter) {
    auto [fx, dfx] = fdf(x);
    out.x = x; out.f = fx; out.iterations = iter;
    if (fx == 0.0) { out.converged = true; return out; }
    if (fx > 0.0) hi = x; else lo = x;
    if (hi - lo <= xtol) { out.converged = true; return out; }
    double step = (dfx != 0.0) ? fx / dfx : 0.0;
    double xn = x - step;
    if (!(xn > lo && xn < hi) || step == 0.0) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 0.25 * xtol) { out.converged = true; return out; }
    x = xn;
  }
  out.converged = false;
  return out;
}

}  // namespace intervalci
