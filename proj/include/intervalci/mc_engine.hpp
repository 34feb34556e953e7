#pragma once

// Monte Carlo harness: ordered-bounds data generation, paired
// efficient/inefficient estimator tuples, and coverage/power estimation.
//
// Replications are independent tasks; each derives its own counter-based
// RNG stream from (seed, replication index), and all aggregation is over
// integer counts, so results are bit-identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "intervalci/confidence_intervals.hpp"
#include "intervalci/errors.hpp"
#include "intervalci/normal.hpp"
#include "intervalci/rng.hpp"

namespace intervalci {

enum class CiKind { ci1, ci2 };

inline const char* to_string(CiKind k) { return k == CiKind::ci1 ? "CI1" : "CI2"; }

/// A data-generating process with almost-surely ordered bound estimators.
/// The efficient channel draws bivariate normal errors with the stated
/// scale parameters; the inefficient channel adds one common N(0, tau^2)
/// shift to both bounds, which preserves ordering surely and inflates both
/// asymptotic variances to sigma^2 + tau^2.
struct DgpSpec {
  double theta_l = 0.0;
  double theta_u = 0.0;
  double sigma_l = 1.0;
  double sigma_u = 1.0;
  double rho = 1.0;
  double noise_tau = 0.0;
  double sigma_lo_bound = 0.25;  // lower bound on sigma^2
  double sigma_hi_bound = 16.0;  // upper bound on sigma^2, including tau
  double delta_bar = 10.0;       // cap on theta_u - theta_l
  bool plugin_noise = false;     // estimate sigma/rho with O(1/sqrt n) noise
  double noise_scale = 1.0;      // c in Var(noise) = c / n

  void validate() const {
    if (!std::isfinite(theta_l) || !std::isfinite(theta_u))
      throw DomainError("dgp: theta bounds must be finite");
    if (!(theta_l <= theta_u)) throw DomainError("dgp: requires theta_l <= theta_u");
    if (!(delta_bar > 0.0)) throw DomainError("dgp: delta_bar must be positive");
    if (!(theta_u - theta_l <= delta_bar))
      throw DomainError("dgp: requires theta_u - theta_l <= delta_bar");
    detail::check_sigma(sigma_l, "dgp sigma_l");
    detail::check_sigma(sigma_u, "dgp sigma_u");
    if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("dgp: rho must lie in [-1, 1]");
    if (std::isnan(noise_tau) || noise_tau < 0.0)
      throw DomainError("dgp: noise_tau must be >= 0");
    if (!(sigma_lo_bound > 0.0) || !(sigma_hi_bound >= sigma_lo_bound))
      throw DomainError("dgp: sigma bounds box must satisfy 0 < lo <= hi");
    const double lo2 = std::min(sigma_l * sigma_l, sigma_u * sigma_u);
    const double hi2 = std::max(sigma_l * sigma_l, sigma_u * sigma_u) +
                       noise_tau * noise_tau;
    if (lo2 < sigma_lo_bound || hi2 > sigma_hi_bound)
      throw DomainError("dgp: sigma^2 (and sigma^2 + tau^2) must lie in the bounds box");
    if (!(noise_scale >= 0.0)) throw DomainError("dgp: noise_scale must be >= 0");
  }

  /// Asymptotic scale parameters of the inefficient channel implied by the
  /// common-shift construction.
  struct Channel {
    double sigma_l;
    double sigma_u;
    double rho;
  };
  Channel efficient_channel() const { return {sigma_l, sigma_u, rho}; }
  Channel inefficient_channel() const {
    const double t2 = noise_tau * noise_tau;
    const double sl = std::sqrt(sigma_l * sigma_l + t2);
    const double su = std::sqrt(sigma_u * sigma_u + t2);
    const double r = (rho * sigma_l * sigma_u + t2) / (sl * su);
    return {sl, su, std::min(1.0, std::max(-1.0, r))};
  }
};

/// A drifting (or fixed) alternative for power experiments.
struct AlternativeSeq {
  enum class Kind { fixed, local_lower, local_upper };
  Kind kind = Kind::local_lower;
  std::optional<double> theta_bar;  // fixed alternatives
  std::optional<double> psi;        // scalar local drift, > 0

  void validate(const DgpSpec& spec) const {
    if (kind == Kind::fixed) {
      if (!theta_bar) throw DomainError("alternative: fixed kind requires theta_bar");
      if (*theta_bar >= spec.theta_l && *theta_bar <= spec.theta_u)
        throw DomainError("alternative: theta_bar must lie outside the identified set");
    } else if (psi && !(*psi > 0.0)) {
      throw DomainError("alternative: local psi must be > 0");
    }
  }
};

/// One Monte Carlo estimate of coverage at a parameter point, for both the
/// efficient and the inefficient channel.
struct PowerPoint {
  double theta = 0.0;
  std::int64_t n = 0;
  double cover_rate_e = 0.0;
  double cover_rate_i = 0.0;
  double mc_se = 0.0;  // sqrt(p(1-p)/reps) at the pooled rate
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  std::int64_t solver_failures = 0;
};

/// A power-curve row: the local drift used (absent for fixed alternatives)
/// plus the coverage estimates.
struct PowerRow {
  std::optional<double> psi;
  PowerPoint point;
};

namespace detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(begin, end) over fixed-size chunks of [0, total) on the given
// number of workers and folds the per-chunk accumulators in chunk order.
template <class Acc, class Fn>
Acc run_chunked(std::int64_t total, int threads, Fn&& fn) {
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t n_chunks = (total + kChunk - 1) / kChunk;
  threads = std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(1, n_chunks));

  std::vector<Acc> partial(static_cast<std::size_t>(n_chunks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      const std::int64_t begin = c * kChunk;
      const std::int64_t end = std::min(total, begin + kChunk);
      partial[static_cast<std::size_t>(c)] = fn(begin, end);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  Acc out{};
  for (const auto& p : partial) out += p;
  return out;
}

struct CoverageCounts {
  std::int64_t covered_e = 0;
  std::int64_t covered_i = 0;
  std::int64_t failures = 0;
  CoverageCounts& operator+=(const CoverageCounts& o) {
    covered_e += o.covered_e;
    covered_i += o.covered_i;
    failures += o.failures;
    return *this;
  }
};

}  // namespace detail

/// Draws one paired (efficient, inefficient) estimator tuple. The bivariate
/// draw is rejection-resampled until the bounds are ordered; the inefficient
/// tuple adds a common shift, so its ordering holds surely.
inline std::pair<EstimatorTuple, EstimatorTuple> draw_estimators(const DgpSpec& spec,
                                                                 std::int64_t n,
                                                                 CounterRng& rng) {
  if (n < 1) throw DomainError("draw_estimators: n must be a positive integer");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double s = std::sqrt(std::max(0.0, (1.0 - spec.rho) * (1.0 + spec.rho)));

  double tl = 0.0, tu = 0.0;
  bool accepted = false;
  for (std::int64_t attempt = 0; attempt < 1000000; ++attempt) {
    const double z1 = rng.next_normal();
    const double z2 = rng.next_normal();
    const double zl = spec.sigma_l * z1;
    const double zu = spec.sigma_u * (spec.rho * z1 + s * z2);
    tl = spec.theta_l + zl / root_n;
    tu = spec.theta_u + zu / root_n;
    if (tl <= tu) {
      accepted = true;
      break;
    }
  }
  if (!accepted) {
    std::ostringstream msg;
    msg << "draw_estimators: ordered-bounds rejection loop exhausted (theta_l=" << spec.theta_l
        << ", theta_u=" << spec.theta_u << ", rho=" << spec.rho << ", n=" << n
        << "); the configured process violates ordering too often";
    throw SolverError(msg.str());
  }

  const double eps = spec.noise_tau > 0.0 ? spec.noise_tau * rng.next_normal() : 0.0;
  const double tl_i = tl + eps / root_n;
  const double tu_i = tu + eps / root_n;

  const auto eff = spec.efficient_channel();
  const auto ineff = spec.inefficient_channel();

  double se_l = eff.sigma_l, se_u = eff.sigma_u, re = eff.rho;
  double si_l = ineff.sigma_l, si_u = ineff.sigma_u, ri = ineff.rho;
  if (spec.plugin_noise && spec.noise_scale > 0.0) {
    const double sd = std::sqrt(spec.noise_scale / static_cast<double>(n));
    const double e1 = rng.next_normal(), e2 = rng.next_normal(), e3 = rng.next_normal();
    // tau = 0 means the channels are the same estimator; perturb identically.
    double f1 = e1, f2 = e2, f3 = e3;
    if (spec.noise_tau > 0.0) {
      f1 = rng.next_normal();
      f2 = rng.next_normal();
      f3 = rng.next_normal();
    }
    se_l = std::max(1e-3, se_l + sd * e1);
    se_u = std::max(1e-3, se_u + sd * e2);
    re = std::min(1.0, std::max(-1.0, re + sd * e3));
    si_l = std::max(1e-3, si_l + sd * f1);
    si_u = std::max(1e-3, si_u + sd * f2);
    ri = std::min(1.0, std::max(-1.0, ri + sd * f3));
  }

  return {EstimatorTuple(tl, tu, se_l, se_u, re, n),
          EstimatorTuple(tl_i, tu_i, si_l, si_u, ri, n)};
}

/// Estimates P(theta in CI) for both channels over `reps` replications.
/// Deterministic given the seed, for any thread count. Solver failures are
/// counted; more than 0.1% of replications failing aborts the run.
inline PowerPoint estimate_coverage(const DgpSpec& spec, double theta, std::int64_t n,
                                    std::int64_t reps, CiKind ci_kind, Alpha alpha,
                                    std::uint64_t seed, int threads = 0) {
  spec.validate();
  if (reps < 1000) throw DomainError("estimate_coverage: reps must be >= 1000");

  auto build = [&](const EstimatorTuple& est) {
    return ci_kind == CiKind::ci1 ? build_ci1(est, alpha) : build_ci2(est, alpha);
  };

  const auto counts = detail::run_chunked<detail::CoverageCounts>(
      reps, threads, [&](std::int64_t begin, std::int64_t end) {
        detail::CoverageCounts local;
        for (std::int64_t rep = begin; rep < end; ++rep) {
          CounterRng rng(seed, static_cast<std::uint64_t>(rep));
          try {
            const auto [est_e, est_i] = draw_estimators(spec, n, rng);
            local.covered_e += covers(build(est_e), theta) ? 1 : 0;
            local.covered_i += covers(build(est_i), theta) ? 1 : 0;
          } catch (const SolverError&) {
            ++local.failures;
          }
        }
        return local;
      });

  if (counts.failures * 1000 > reps) {
    std::ostringstream msg;
    msg << "estimate_coverage: " << counts.failures << " of " << reps
        << " replications failed (theta=" << theta << ", n=" << n << ")";
    throw SolverError(msg.str());
  }

  const std::int64_t effective = reps - counts.failures;
  PowerPoint pp;
  pp.theta = theta;
  pp.n = n;
  pp.reps = reps;
  pp.seed = seed;
  pp.solver_failures = counts.failures;
  pp.cover_rate_e = static_cast<double>(counts.covered_e) / static_cast<double>(effective);
  pp.cover_rate_i = static_cast<double>(counts.covered_i) / static_cast<double>(effective);
  const double pooled = 0.5 * (pp.cover_rate_e + pp.cover_rate_i);
  pp.mc_se = std::sqrt(std::max(0.0, pooled * (1.0 - pooled)) /
                       static_cast<double>(effective));
  return pp;
}

/// Coverage estimates over an (n, psi) grid with common random numbers
/// across channels and grid points. For fixed alternatives the psi grid is
/// ignored and theta_bar is evaluated at each n.
inline std::vector<PowerRow> power_curve(const DgpSpec& spec, const AlternativeSeq& alt,
                                         const std::vector<std::int64_t>& n_grid,
                                         const std::vector<double>& psi_grid,
                                         CiKind ci_kind, Alpha alpha, std::int64_t reps,
                                         std::uint64_t seed, int threads = 0) {
  spec.validate();
  alt.validate(spec);
  if (n_grid.empty()) throw DomainError("power_curve: empty n grid");
  if (alt.kind != AlternativeSeq::Kind::fixed && psi_grid.empty())
    throw DomainError("power_curve: empty psi grid");

  std::vector<PowerRow> rows;
  for (const std::int64_t n : n_grid) {
    if (n < 1) throw DomainError("power_curve: n must be a positive integer");
    const double root_n = std::sqrt(static_cast<double>(n));
    if (alt.kind == AlternativeSeq::Kind::fixed) {
      PowerRow row;
      row.psi = std::nullopt;
      row.point = estimate_coverage(spec, *alt.theta_bar, n, reps, ci_kind, alpha, seed,
                                    threads);
      rows.push_back(row);
      continue;
    }
    for (const double psi : psi_grid) {
      if (std::isnan(psi) || psi < 0.0)
        throw DomainError("power_curve: psi grid values must be >= 0");
      const double theta = alt.kind == AlternativeSeq::Kind::local_lower
                               ? spec.theta_l - psi / root_n
                               : spec.theta_u + psi / root_n;
      PowerRow row;
      row.psi = psi;
      row.point = estimate_coverage(spec, theta, n, reps, ci_kind, alpha, seed, threads);
      rows.push_back(row);
    }
  }
  return rows;
}

/// One row of the ordering-violation diagnostic: raw (pre-rejection) draws
/// against the normal-difference law of theta_l_hat - theta_u_hat.
struct Near1Row {
  std::size_t config_index = 0;
  std::int64_t n = 0;
  double mu = 0.0;          // sqrt(n) * (theta_u - theta_l)
  double diff_sd = 0.0;     // sd of the scaled bound difference
  double expected_rate = 0.0;
  double observed_rate = 0.0;
  std::int64_t reps = 0;
  double mc_se = 0.0;
};

/// Measures how often raw bivariate draws violate the bound ordering, per
/// (spec, n) pair, and compares with the closed-form normal-difference rate.
/// Sequences approaching a finite scaled length with rho < 1 or unequal
/// sigmas show violation rates bounded away from zero; the degenerate
/// rho = 1, equal-sigma sequences show none.
inline std::vector<Near1Row> near1_diagnostic(const std::vector<DgpSpec>& specs,
                                              const std::vector<std::int64_t>& n_grid,
                                              std::int64_t reps = 200000,
                                              std::uint64_t seed = 0x5eed0001u,
                                              int threads = 0) {
  if (specs.size() != n_grid.size())
    throw DomainError("near1_diagnostic: specs and n_grid must be aligned");
  std::vector<Near1Row> rows;
  for (std::size_t idx = 0; idx < specs.size(); ++idx) {
    const DgpSpec& spec = specs[idx];
    spec.validate();
    const std::int64_t n = n_grid[idx];
    const double root_n = std::sqrt(static_cast<double>(n));
    const double mu = root_n * (spec.theta_u - spec.theta_l);
    const double var_diff = spec.sigma_l * spec.sigma_l + spec.sigma_u * spec.sigma_u -
                            2.0 * spec.rho * spec.sigma_l * spec.sigma_u;
    const double sd = std::sqrt(std::max(0.0, var_diff));
    const double expected = sd > 0.0 ? norm_cdf(-mu / sd) : 0.0;

    const double s = std::sqrt(std::max(0.0, (1.0 - spec.rho) * (1.0 + spec.rho)));
    struct Acc {
      std::int64_t violations = 0;
      Acc& operator+=(const Acc& o) {
        violations += o.violations;
        return *this;
      }
    };
    const auto acc = detail::run_chunked<Acc>(
        reps, threads, [&](std::int64_t begin, std::int64_t end) {
          Acc local;
          for (std::int64_t rep = begin; rep < end; ++rep) {
            CounterRng rng(seed + idx, static_cast<std::uint64_t>(rep));
            const double z1 = rng.next_normal();
            const double z2 = rng.next_normal();
            const double zl = spec.sigma_l * z1;
            const double zu = spec.sigma_u * (spec.rho * z1 + s * z2);
            const double tl = spec.theta_l + zl / root_n;
            const double tu = spec.theta_u + zu / root_n;
            if (tl > tu) ++local.violations;
          }
          return local;
        });

    Near1Row row;
    row.config_index = idx;
    row.n = n;
    row.mu = mu;
    row.diff_sd = sd;
    row.expected_rate = expected;
    row.observed_rate = static_cast<double>(acc.violations) / static_cast<double>(reps);
    row.reps = reps;
    row.mc_se = std::sqrt(std::max(1e-12, expected * (1.0 - expected)) /
                          static_cast<double>(reps));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace intervalci
