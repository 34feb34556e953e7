#pragma once

// CI1 and CI2 intervals assembled from a realized estimator tuple.

#include <cmath>
#include <cstdint>
#include <string>

#include "intervalci/critical_values.hpp"
#include "intervalci/errors.hpp"
#include "intervalci/normal.hpp"

namespace intervalci {

/// One realized draw of the bounds estimators with their estimated
/// asymptotic scale parameters and the sample size. Tuples that violate the
/// almost-sure ordering theta_l_hat <= theta_u_hat are rejected outright:
/// in an ordered-bounds setup such a draw signals a harness bug, not data.
struct EstimatorTuple {
  double theta_l_hat;
  double theta_u_hat;
  double sigma_l_hat;
  double sigma_u_hat;
  Corr rho_hat;
  std::int64_t n;

  EstimatorTuple(double theta_l, double theta_u, double sigma_l, double sigma_u,
                 Corr rho, std::int64_t n_in)
      : theta_l_hat(theta_l),
        theta_u_hat(theta_u),
        sigma_l_hat(sigma_l),
        sigma_u_hat(sigma_u),
        rho_hat(rho),
        n(n_in) {
    if (!std::isfinite(theta_l) || !std::isfinite(theta_u))
      throw DomainError("estimator tuple: bound estimates must be finite");
    if (!(theta_l <= theta_u))
      throw DomainError("estimator tuple: requires theta_l_hat <= theta_u_hat");
    detail::check_sigma(sigma_l, "sigma_l_hat");
    detail::check_sigma(sigma_u, "sigma_u_hat");
    if (n < 1) throw DomainError("estimator tuple: n must be a positive integer");
  }

  double sqrt_n() const { return std::sqrt(static_cast<double>(n)); }
  double scaled_length() const { return sqrt_n() * (theta_u_hat - theta_l_hat); }
};

/// A closed real interval [lo, hi].
struct Interval {
  double lo;
  double hi;

  Interval(double lo_in, double hi_in) : lo(lo_in), hi(hi_in) {
    if (!(lo <= hi)) throw DomainError("interval: requires lo <= hi");
  }
  double length() const { return hi - lo; }
};

/// Closed-interval membership; endpoints count as covered.
inline bool covers(const Interval& ci, double theta) {
  return ci.lo <= theta && theta <= ci.hi;
}

/// CI1: symmetric critical value around both bound estimates.
/// rho_hat is accepted but unused; the defining equation involves only the
/// scaled estimated length and the larger sigma.
inline Interval build_ci1(const EstimatorTuple& est, Alpha alpha) {
  const double root_n = est.sqrt_n();
  const double c = solve_c1(est.scaled_length(), est.sigma_l_hat, est.sigma_u_hat, alpha).c;
  return Interval(est.theta_l_hat - est.sigma_l_hat * c / root_n,
                  est.theta_u_hat + est.sigma_u_hat * c / root_n);
}

/// CI2: per-side critical pair from the bivariate length-minimizing program.
inline Interval build_ci2(const EstimatorTuple& est, Alpha alpha) {
  const double root_n = est.sqrt_n();
  const CritPair cp = solve_c2(est.scaled_length(), est.sigma_l_hat, est.sigma_u_hat,
                               est.rho_hat, alpha);
  return Interval(est.theta_l_hat - est.sigma_l_hat * cp.c_l / root_n,
                  est.theta_u_hat + est.sigma_u_hat * cp.c_u / root_n);
}

}  // namespace intervalci
