#pragma once

// Critical values for interval confidence intervals.
//
// solve_c1 / solve_g handle the scalar equation
//     Phi(c + y) - Phi(-c) = 1 - alpha,
// whose left side is strictly increasing with a value below 1 - alpha at
// c = 0, so the positive root is unique and lies in [Phi^-1(1-alpha),
// Phi^-1(1-alpha/2)].
//
// solve_c2 minimizes sigma_l*c_l + sigma_u*c_u subject to two bivariate
// normal coverage constraints, each of the form
//     P(U >= -x, V <= y) >= 1 - alpha
// with (x, y) = (c_l, c_u + delta/sigma_u) and (c_l + delta/sigma_l, c_u).
// Both constraints share one binding curve y = beta(x); the solver locates
// the point where both bind, falls back to tangency or corner solutions
// when that point is not the minimizer, and always projects the returned
// pair onto the feasible envelope.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "intervalci/errors.hpp"
#include "intervalci/normal.hpp"
#include "intervalci/root_find.hpp"

namespace intervalci {

/// Significance level, restricted to (0, 0.5).
class Alpha {
 public:
  Alpha(double v) : v_(v) {
    if (!(v > 0.0 && v < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
  }
  operator double() const noexcept { return v_; }
  double value() const noexcept { return v_; }

 private:
  double v_;
};

/// A scalar critical value together with the residual of its defining
/// equation at the returned point.
struct CritScalar {
  double c = 0.0;
  double residual = 0.0;
};

/// Which branch of the CI2 program produced the returned pair. The program
/// may have multiple minimizers; the solver records the branch it took
/// rather than claiming uniqueness.
enum class Ci2Branch {
  delta_inf,         // delta large: constraints decouple into two tails
  comonotone_equal,  // rho = 1 and sigma_l = sigma_u: scalar closed form
  crossing,          // both constraints bind
  tangency,          // one constraint binds, objective tangent to its curve
  corner,            // boundary solution at the smallest feasible c_l
};

/// Critical pair for CI2. binding1/binding2 flag whether each constraint of
/// the program holds with equality within 1e-6.
struct CritPair {
  double c_l = 0.0;
  double c_u = 0.0;
  bool binding1 = false;
  bool binding2 = false;
  double objective = 0.0;  // sigma_l * c_l + sigma_u * c_u
  double prob1 = 0.0;      // achieved probability of constraint 1
  double prob2 = 0.0;      // achieved probability of constraint 2
  Ci2Branch branch = Ci2Branch::crossing;
};

namespace detail {

// Equation arguments y above this threshold are numerically infinite:
// Phi(c + y) is 1 to machine precision, so the root equals the analytic
// delta = inf limit exactly.
inline constexpr double kLargeShift = 40.0;

inline void check_sigma(double sigma, const char* name) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError(std::string(name) + " must be a positive finite real");
}

}  // namespace detail

/// G(y): the unique c > 0 with Phi(c + y) - Phi(-c) = 1 - alpha, for
/// y in [0, +inf]. G is strictly decreasing with G(0) = Phi^-1(1-alpha/2)
/// and G(+inf) = Phi^-1(1-alpha).
inline CritScalar solve_g(double y, Alpha alpha) {
  if (std::isnan(y) || y < 0.0) throw DomainError("solve_g: y must be >= 0");
  const double q = 1.0 - alpha;
  auto eqn = [&](double c) { return norm_cdf(c + y) - norm_cdf(-c) - q; };

  if (y >= detail::kLargeShift) {
    double c = norm_quantile(q);
    return {c, eqn(c)};
  }
  const double hi = norm_quantile(1.0 - 0.5 * alpha) + 1.0;
  RootResult r = brent_root(eqn, 0.0, hi, eqn(0.0), eqn(hi), 1e-14, 1e-14);
  if (!r.converged)
    throw SolverError("solve_g: root search failed at y=" + std::to_string(y));
  return {r.x, r.f};
}

/// dG/dy, from implicit differentiation of the defining equation:
/// G'(y) = -phi(G+y) / (phi(G+y) + phi(-G)), always in (-1, 0).
inline double g_prime(double y, Alpha alpha) {
  if (!std::isfinite(y) || y < 0.0)
    throw DomainError("g_prime: y must be a finite nonnegative real");
  const double g = solve_g(y, alpha).c;
  const double num = detail::phi_raw(g + y);
  return -num / (num + detail::phi_raw(g));
}

/// Critical value for CI1: the unique c > 0 with
/// Phi(c + delta / max(sigma_l, sigma_u)) - Phi(-c) = 1 - alpha.
/// delta = +inf (or numerically indistinguishable from it) returns
/// Phi^-1(1-alpha) through the analytic branch.
inline CritScalar solve_c1(double delta, double sigma_l, double sigma_u, Alpha alpha) {
  if (std::isnan(delta) || delta < 0.0)
    throw DomainError("solve_c1: delta must be >= 0");
  detail::check_sigma(sigma_l, "sigma_l");
  detail::check_sigma(sigma_u, "sigma_u");
  const double smax = std::max(sigma_l, sigma_u);
  return solve_g(delta / smax, alpha);
}

namespace detail {

// The CI2 program for fixed (delta, sigma_l, sigma_u, rho, alpha).
struct Ci2Program {
  double sl, su;  // objective weights
  double dl, du;  // delta / sigma_l, delta / sigma_u
  double rho, s;  // correlation and sqrt(1 - rho^2)
  double q;       // 1 - alpha
  double z1a;     // Phi^-1(1 - alpha)

  Ci2Program(double delta, double sigma_l, double sigma_u, double rho_in, double alpha)
      : sl(sigma_l),
        su(sigma_u),
        dl(delta / sigma_l),
        du(delta / sigma_u),
        rho(rho_in),
        s(std::sqrt(std::max(0.0, (1.0 - rho_in) * (1.0 + rho_in)))),
        q(1.0 - alpha),
        z1a(norm_quantile(1.0 - alpha)) {}

  // B(x, y) = P(U >= -x, V <= y); both constraints are B(.,.) >= q.
  double B(double x, double y) const { return bvn_ge_le(-x, y, rho); }

  double cond_cdf(double t) const {
    if (s > 0.0) return norm_cdf(t / s);
    return t > 0.0 ? 1.0 : (t < 0.0 ? 0.0 : 0.5);
  }
  double Bx(double x, double y) const { return phi_raw(x) * cond_cdf(y + rho * x); }
  double By(double x, double y) const { return phi_raw(y) * cond_cdf(x + rho * y); }

  double constraint1(double cl, double cu) const { return B(cl, cu + du); }
  double constraint2(double cl, double cu) const { return B(cl + dl, cu); }

  // beta(x): the y solving B(x, y) = q. Defined for x > z1a; increasing
  // left side in y guarantees a unique root in [z1a - 1e-9, 9.5].
  double beta(double x, double hint) const {
    const double lo = z1a - 1e-9;
    const double hi = 9.5;
    auto fdf = [&](double y) { return std::pair<double, double>(B(x, y) - q, By(x, y)); };
    RootResult r = newton_bisect(fdf, lo, hi, hint, 1e-13);
    if (!r.converged)
      throw SolverError("solve_c2: constraint curve solve failed at x=" + std::to_string(x));
    return r.x;
  }

  // Tangency condition along the shared binding curve: the objective level
  // line is parallel to the curve where T(x) = 0.
  double tangency_fn(double x, double bx) const {
    return su * Bx(x, bx) - sl * By(x, bx);
  }
};

struct Ci2Candidate {
  double cl = 0.0;
  double cu = 0.0;
  double objective = 0.0;
  Ci2Branch branch = Ci2Branch::crossing;
};

}  // namespace detail

/// Critical pair for CI2: minimize sigma_l*c_l + sigma_u*c_u subject to the
/// two bivariate coverage constraints at level 1 - alpha. Returns both
/// critical values with achieved constraint probabilities and binding flags.
/// Ties between minimizers break toward the smallest c_l.
inline CritPair solve_c2(double delta, double sigma_l, double sigma_u, Corr rho,
                         Alpha alpha) {
  if (std::isnan(delta) || delta < 0.0)
    throw DomainError("solve_c2: delta must be >= 0");
  detail::check_sigma(sigma_l, "sigma_l");
  detail::check_sigma(sigma_u, "sigma_u");

  const double q = 1.0 - alpha;
  const double smax = std::max(sigma_l, sigma_u);

  // Quadrature conditioning degrades near |rho| = 1; the program there is
  // the degenerate one and we solve that exactly.
  double rho_eff = rho;
  if (std::abs(rho_eff) >= 1.0 - 1e-8) rho_eff = std::copysign(1.0, rho_eff);

  auto finish = [&](double cl, double cu, Ci2Branch branch,
                    const detail::Ci2Program& prog) {
    CritPair out;
    out.c_l = cl;
    out.c_u = cu;
    out.objective = sigma_l * cl + sigma_u * cu;
    out.prob1 = prog.constraint1(cl, cu);
    out.prob2 = prog.constraint2(cl, cu);
    out.binding1 = std::abs(out.prob1 - q) <= 1e-6;
    out.binding2 = std::abs(out.prob2 - q) <= 1e-6;
    out.branch = branch;
    if (out.prob1 < q - 1e-9 || out.prob2 < q - 1e-9) {
      std::ostringstream msg;
      msg << "solve_c2: infeasible result (delta=" << delta << ", sigma_l=" << sigma_l
          << ", sigma_u=" << sigma_u << ", rho=" << static_cast<double>(rho)
          << ", alpha=" << static_cast<double>(alpha) << ", probs=" << out.prob1 << ","
          << out.prob2 << ")";
      throw SolverError(msg.str());
    }
    return out;
  };

  // Large delta: the two constraints decouple into independent one-sided
  // tails with unique solution (z1a, z1a).
  if (delta == kInf || delta >= detail::kLargeShift * smax) {
    detail::Ci2Program prog(delta, sigma_l, sigma_u, rho_eff, alpha);
    return finish(prog.z1a, prog.z1a, Ci2Branch::delta_inf, prog);
  }

  // rho = 1 with equal sigmas: scalar closed form G(delta/sigma).
  if (rho_eff == 1.0 && std::abs(sigma_l - sigma_u) <= 1e-12 * smax) {
    detail::Ci2Program prog(delta, sigma_l, sigma_u, 1.0, alpha);
    const double g = solve_g(delta / sigma_l, alpha).c;
    return finish(g, g, Ci2Branch::comonotone_equal, prog);
  }

  detail::Ci2Program prog(delta, sigma_l, sigma_u, rho_eff, alpha);
  const double z1a = prog.z1a;
  const double zhalf = norm_quantile(1.0 - 0.5 * static_cast<double>(alpha));
  const double cl_lo = z1a + 1e-9;

  // Feasible envelope: given c_l, the smallest feasible c_u.
  auto envelope_cu = [&](double cl) {
    double need1 = prog.beta(cl, zhalf) - prog.du;
    double need2 = prog.beta(cl + prog.dl, zhalf);
    return std::max(need1, need2);
  };
  auto make_candidate = [&](double cl, Ci2Branch branch) {
    detail::Ci2Candidate cand;
    cand.cl = cl;
    cand.cu = envelope_cu(cl);
    cand.objective = sigma_l * cl + sigma_u * cand.cu;
    cand.branch = branch;
    return cand;
  };

  // Tangency point x* of the shared curve, where the objective direction is
  // tangent. Returns false when the curve is flat at the left end (then only
  // corner solutions exist).
  auto tangency_x = [&](double& x_out) {
    auto T = [&](double x) { return prog.tangency_fn(x, prog.beta(x, zhalf)); };
    double lo = cl_lo;
    double t_lo = T(lo);
    if (t_lo <= 0.0) return false;
    double hi = zhalf + 1.0;
    double t_hi = T(hi);
    while (t_hi > 0.0 && hi < 45.0) {
      hi = hi * 1.6 + 0.5;
      t_hi = T(hi);
    }
    if (t_hi > 0.0) return false;
    RootResult r = brent_root(T, lo, hi, t_lo, t_hi, 1e-11);
    if (!r.converged) return false;
    x_out = r.x;
    return true;
  };

  std::vector<detail::Ci2Candidate> candidates;

  const bool coincident = delta <= 1e-6 * smax;
  if (!coincident) {
    // Both-binding point. With constraint 2 binding, c_u = beta(c_l + dl);
    // constraint 1 then binds where B(c_l, c_u + du) = q, i.e. (using the
    // exchange symmetry B(x, y) = B(y, x)) where
    //     c_l = beta(beta(c_l + dl) + du).
    // The composition only evaluates beta on its flat side, so the root is
    // well conditioned even when one constraint curve is near vertical.
    auto cross_fn = [&](double cl) {
      const double cu2 = prog.beta(cl + prog.dl, zhalf);
      return prog.beta(cu2 + prog.du, zhalf) - cl;
    };
    const double f_lo = cross_fn(cl_lo);
    if (f_lo >= 0.0) {
      double hi = zhalf + (sigma_l / sigma_u) * (zhalf - z1a) + 1.0;
      double f_hi = cross_fn(hi);
      while (f_hi >= 0.0 && hi < 45.0) {
        hi = hi * 1.6 + 0.5;
        f_hi = cross_fn(hi);
      }
      if (f_hi >= 0.0)
        throw SolverError("solve_c2: no both-binding point found (delta=" +
                          std::to_string(delta) + ", rho=" + std::to_string(rho_eff) + ")");
      RootResult r = brent_root(cross_fn, cl_lo, hi, f_lo, f_hi, 1e-12);
      detail::Ci2Candidate crossing = make_candidate(r.x, Ci2Branch::crossing);
      candidates.push_back(crossing);

      // KKT cone test: accept the crossing alone when the objective lies in
      // the cone of the two active constraint gradients.
      double g1x = prog.Bx(crossing.cl, crossing.cu + prog.du);
      double g1y = prog.By(crossing.cl, crossing.cu + prog.du);
      double g2x = prog.Bx(crossing.cl + prog.dl, crossing.cu);
      double g2y = prog.By(crossing.cl + prog.dl, crossing.cu);
      double det = g1x * g2y - g2x * g1y;
      bool in_cone = true;
      if (std::abs(det) > 1e-14) {
        double lam1 = (sigma_l * g2y - sigma_u * g2x) / det;
        double lam2 = (sigma_u * g1x - sigma_l * g1y) / det;
        double scale = std::abs(lam1) + std::abs(lam2) + 1.0;
        in_cone = lam1 >= -1e-7 * scale && lam2 >= -1e-7 * scale;
      }
      if (in_cone) return finish(crossing.cl, crossing.cu, Ci2Branch::crossing, prog);
    } else {
      // Constraint 1 is already slack at the smallest feasible c_l with c_u
      // on the constraint-2 curve; the minimum sits at that boundary unless
      // a tangency below wins.
      candidates.push_back(make_candidate(cl_lo, Ci2Branch::corner));
    }
  }

  // Tangency candidates on each constraint curve (in the coincident case
  // this is the whole solution; otherwise it covers single-binding optima).
  double xstar;
  if (tangency_x(xstar)) {
    candidates.push_back(make_candidate(xstar, Ci2Branch::tangency));           // curve 1
    double cl2 = xstar - prog.dl;
    if (cl2 > cl_lo) candidates.push_back(make_candidate(cl2, Ci2Branch::tangency));  // curve 2
  } else if (coincident) {
    candidates.push_back(make_candidate(cl_lo, Ci2Branch::corner));
  }

  if (candidates.empty())
    throw SolverError("solve_c2: no feasible candidate (delta=" + std::to_string(delta) +
                      ", rho=" + std::to_string(rho_eff) + ")");

  const auto* best = &candidates.front();
  for (const auto& cand : candidates) {
    if (cand.objective < best->objective - 1e-12 ||
        (std::abs(cand.objective - best->objective) <= 1e-12 && cand.cl < best->cl)) {
      best = &cand;
    }
  }
  return finish(best->cl, best->cu, best->branch, prog);
}

}  // namespace intervalci
