#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "intervalci/limit_power.hpp"
#include "intervalci/rng.hpp"
#include "support/oracles.hpp"

using namespace intervalci;
using Catch::Matchers::WithinAbs;

TEST_CASE("eval_h boundary and limit values") {
  CHECK_THAT(eval_h(1.0, 0.0, 0.0, Alpha(0.05)), WithinAbs(0.95, 1e-12));
  CHECK_THAT(eval_h(1.0, 1.0, kInf, Alpha(0.05)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(eval_h(2.0, 0.0, 0.0, Alpha(0.10)), WithinAbs(0.90, 1e-12));
  CHECK_THROWS_AS(eval_h(0.0, 0.0, 0.0, Alpha(0.05)), DomainError);
  CHECK_THROWS_AS(eval_h(-1.0, 0.0, 0.0, Alpha(0.05)), DomainError);
  CHECK_THROWS_AS(eval_h(1.0, kInf, 0.0, Alpha(0.05)), DomainError);
  CHECK_THROWS_AS(eval_h(1.0, -0.5, 0.0, Alpha(0.05)), DomainError);
  CHECK_THROWS_AS(eval_h(1.0, 0.0, -0.5, Alpha(0.05)), DomainError);
}

TEST_CASE("eval_h agrees with a Monte Carlo of the degenerate procedure") {
  // Degenerate (rho = 1, equal sigma) channel: coverage of the local
  // alternative is the chance that a single standard normal falls in
  // [-(psi+mu)/sigma - G, G - psi/sigma].
  const double sigma = 1.5, mu = 0.5, psi = 2.0;
  const Alpha alpha(0.05);
  const double h = eval_h(sigma, mu, psi, alpha);
  // 40-digit quadrature reference for the same quantity
  CHECK_THAT(h, WithinAbs(0.6865874543697005541782, 1e-11));

  const double g = solve_g(mu / sigma, alpha).c;
  const std::int64_t reps = 1000000;
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < reps; ++r) {
    CounterRng rng(0xabcdef12u, static_cast<std::uint64_t>(r));
    const double z = rng.next_normal();
    if (z >= -(psi + mu) / sigma - g && z <= g - psi / sigma) ++hits;
  }
  const double mc = static_cast<double>(hits) / static_cast<double>(reps);
  const double se = std::sqrt(h * (1.0 - h) / static_cast<double>(reps));
  CHECK_THAT(mc, WithinAbs(h, 3.0 * se));
}

TEST_CASE("eval_h monotonicity in sigma and psi") {
  const Alpha alpha(0.05);
  for (double mu : {0.0, 0.7, 2.0}) {
    for (double psi : {0.0, 0.5, 2.0, 5.0}) {
      double prev = -1.0;
      for (double sigma = 0.5; sigma <= 3.0 + 1e-9; sigma += 0.01) {
        const double h = eval_h(sigma, mu, psi, alpha);
        CHECK(h >= prev - 1e-10);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0);
        prev = h;
      }
    }
  }
  for (double sigma : {0.6, 1.0, 2.4}) {
    for (double mu : {0.0, 1.0}) {
      double prev = 2.0;
      for (double psi = 0.0; psi <= 6.0 + 1e-9; psi += 0.05) {
        const double h = eval_h(sigma, mu, psi, Alpha(0.05));
        CHECK(h <= prev + 1e-10);
        prev = h;
      }
      // coverage at the boundary alternative never dips below 1 - alpha
      CHECK(eval_h(sigma, mu, 0.0, Alpha(0.05)) >= 0.95 - 1e-10);
    }
  }
}

TEST_CASE("h_monotonicity_scan reports no violations") {
  SECTION("coarse grid") {
    std::vector<HGridPoint> grid;
    for (double s : {0.5, 1.0, 2.0})
      for (double m : {0.0, 1.0})
        for (double p : {0.0, 1.0, 5.0}) grid.push_back({s, m, p});
    const auto report = h_monotonicity_scan(grid, Alpha(0.05));
    CHECK(report.violations.empty());
    CHECK(report.pairs_checked == 12);
  }
  SECTION("single sigma has no pairs") {
    const auto report = h_monotonicity_scan({{1.0, 0.0, 0.0}}, Alpha(0.05));
    CHECK(report.violations.empty());
    CHECK(report.pairs_checked == 0);
  }
  SECTION("dense sigma sweep") {
    std::vector<HGridPoint> grid;
    for (double s = 0.5; s <= 3.0 + 1e-9; s += 0.01) grid.push_back({s, 0.7, 2.0});
    const auto report = h_monotonicity_scan(grid, Alpha(0.10));
    CHECK(report.violations.empty());
  }
}

TEST_CASE("eval_w closed forms and regime checks") {
  const Alpha alpha(0.05);
  SECTION("mu = inf decoupled form") {
    CHECK_THAT(eval_w(LimitSigmas(1.0, 1.0, 0.7), DriftParams(kInf, 0.0), alpha),
               WithinAbs(0.95, 1e-12));
    // Phi(z95 - 1.2), reference Phi(0.4449) = 0.67180398867902554
    CHECK_THAT(eval_w(LimitSigmas(1.0, 1.0, 0.7), DriftParams(kInf, 1.2), alpha),
               WithinAbs(norm_cdf(norm_quantile(0.95) - 1.2), 1e-12));
    CHECK_THAT(eval_w(LimitSigmas(1.0, 2.0, -0.3), DriftParams(kInf, kInf), alpha),
               WithinAbs(0.0, 1e-15));
  }
  SECTION("finite mu collapses to H in the degenerate regime") {
    CHECK_THAT(eval_w(LimitSigmas(1.0, 1.0, 1.0), DriftParams(0.0, 0.0), alpha),
               WithinAbs(0.95, 1e-12));
    CHECK_THAT(eval_w(LimitSigmas(1.3, 1.3, 1.0), DriftParams(0.8, 1.5), alpha),
               WithinAbs(eval_h(1.3, 0.8, 1.5, alpha), 1e-14));
  }
  SECTION("finite mu outside the degenerate regime is rejected") {
    CHECK_THROWS_AS(eval_w(LimitSigmas(1.0, 1.0, 0.7), DriftParams(1.0, 0.0), alpha),
                    DomainError);
    CHECK_THROWS_AS(eval_w(LimitSigmas(1.0, 1.2, 1.0), DriftParams(1.0, 0.0), alpha),
                    DomainError);
  }
}

TEST_CASE("eval_w quadrature mode agrees with the analytic branches") {
  const Alpha alpha(0.05);
  for (double psi : {0.0, 0.4, 1.2, 3.0}) {
    const double analytic =
        eval_w(LimitSigmas(1.0, 1.5, 0.2), DriftParams(kInf, psi), alpha);
    const double quad = eval_w(LimitSigmas(1.0, 1.5, 0.2), DriftParams(kInf, psi), alpha,
                               LimitCi::ci1, WMode::quadrature);
    CHECK_THAT(quad, WithinAbs(analytic, 1e-6));
  }
  for (double mu : {0.0, 0.5, 2.0}) {
    for (double psi : {0.0, 1.0, 2.5}) {
      const double analytic =
          eval_w(LimitSigmas(1.2, 1.2, 1.0), DriftParams(mu, psi), alpha);
      const double quad = eval_w(LimitSigmas(1.2, 1.2, 1.0), DriftParams(mu, psi), alpha,
                                 LimitCi::ci1, WMode::quadrature);
      CHECK_THAT(quad, WithinAbs(analytic, 1e-6));
    }
  }
}

TEST_CASE("eval_w agrees with Monte Carlo of the defining event") {
  const Alpha alpha(0.05);
  struct Point {
    double sl, su, rho, mu, psi;
  };
  // ten points across both reachable regimes
  const std::vector<Point> grid = {
      {1.0, 1.0, 1.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 0.0, 1.0}, {1.0, 1.0, 1.0, 1.0, 0.5},
      {1.5, 1.5, 1.0, 0.5, 2.0}, {0.8, 0.8, 1.0, 2.0, 1.0}, {1.0, 1.0, 0.5, kInf, 0.0},
      {1.0, 1.3, 0.2, kInf, 1.0}, {1.4, 0.9, -0.4, kInf, 2.0}, {2.0, 2.0, 1.0, 3.0, 1.0},
      {1.0, 2.0, 0.9, kInf, 0.5},
  };
  const std::int64_t reps = 1000000;
  int idx = 0;
  for (const auto& pt : grid) {
    const double w = eval_w(LimitSigmas(pt.sl, pt.su, pt.rho), DriftParams(pt.mu, pt.psi),
                            alpha);
    const double s = std::sqrt(std::max(0.0, 1.0 - pt.rho * pt.rho));
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < reps; ++r) {
      CounterRng rng(0x77aa0000u + static_cast<std::uint64_t>(idx),
                     static_cast<std::uint64_t>(r));
      const double z1 = rng.next_normal();
      const double z2 = rng.next_normal();
      // critical function evaluated at the realized scaled length
      const double arg = pt.mu == kInf
                             ? kInf
                             : z2 * pt.su * s + z1 * (pt.rho * pt.su - pt.sl) + pt.mu;
      const double f = solve_c1(std::max(0.0, arg), pt.sl, pt.su, alpha).c;
      const bool ev1 = -f <= -z1 - pt.psi / pt.sl;
      const bool ev2 = -pt.psi / pt.su <= z2 * s + z1 * pt.rho +
                                              (pt.mu == kInf ? kInf : pt.mu / pt.su) + f;
      if (ev1 && ev2) ++hits;
    }
    const double mc = static_cast<double>(hits) / static_cast<double>(reps);
    const double se = std::sqrt(std::max(w * (1.0 - w), 1e-9) / static_cast<double>(reps));
    INFO("point " << idx << ": w=" << w << " mc=" << mc);
    CHECK_THAT(mc, WithinAbs(w, 3.0 * se));
    ++idx;
  }
}

TEST_CASE("power_dominance_limit orders the two channels") {
  const Alpha alpha(0.05);
  SECTION("degenerate regime dominance") {
    const auto [we, wi] = power_dominance_limit(LimitSigmas(1.0, 1.0, 1.0),
                                                LimitSigmas(1.5, 1.5, 1.0), 0.5, 2.0, alpha);
    CHECK(static_cast<double>(we) < static_cast<double>(wi));
    CHECK_THAT(we, WithinAbs(eval_h(1.0, 0.5, 2.0, alpha), 1e-14));
    CHECK_THAT(wi, WithinAbs(eval_h(1.5, 0.5, 2.0, alpha), 1e-14));
  }
  SECTION("equal channels tie") {
    const auto [we, wi] = power_dominance_limit(LimitSigmas(1.2, 1.2, 1.0),
                                                LimitSigmas(1.2, 1.2, 1.0), 1.0, 1.0, alpha);
    CHECK_THAT(we, WithinAbs(static_cast<double>(wi), 1e-12));
  }
  SECTION("mu = inf closed-form comparison") {
    const auto [we, wi] = power_dominance_limit(LimitSigmas(1.0, 1.0, 0.3),
                                                LimitSigmas(2.0, 2.0, 0.3), kInf, 1.0, alpha);
    const double z95 = norm_quantile(0.95);
    CHECK_THAT(we, WithinAbs(norm_cdf(z95 - 1.0), 1e-12));
    CHECK_THAT(wi, WithinAbs(norm_cdf(z95 - 0.5), 1e-12));
    CHECK(static_cast<double>(we) < static_cast<double>(wi));
  }
  SECTION("violated efficiency ordering is rejected") {
    CHECK_THROWS_AS(power_dominance_limit(LimitSigmas(2.0, 1.0, 1.0),
                                          LimitSigmas(1.0, 1.0, 1.0), 0.0, 0.0, alpha),
                    DomainError);
  }
}

TEST_CASE("g_prime matches central differences of solve_g") {
  for (double a : {0.05, 0.10}) {
    for (double y : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      const double h = 1e-5;
      const double lo = std::max(0.0, y - h);
      const double fd =
          (solve_g(y + h, Alpha(a)).c - solve_g(lo, Alpha(a)).c) / (y + h - lo);
      CHECK_THAT(g_prime(y, Alpha(a)), WithinAbs(fd, 1e-5));
    }
  }
}
