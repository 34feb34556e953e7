#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "intervalci/confidence_intervals.hpp"
#include "support/oracles.hpp"

using namespace intervalci;
using Catch::Matchers::WithinAbs;

TEST_CASE("EstimatorTuple validates its invariants") {
  CHECK_THROWS_AS(EstimatorTuple(1.0, 0.0, 1.0, 1.0, 0.5, 100), DomainError);
  CHECK_THROWS_AS(EstimatorTuple(0.0, 1.0, 0.0, 1.0, 0.5, 100), DomainError);
  CHECK_THROWS_AS(EstimatorTuple(0.0, 1.0, 1.0, -1.0, 0.5, 100), DomainError);
  CHECK_THROWS_AS(EstimatorTuple(0.0, 1.0, 1.0, 1.0, 1.5, 100), DomainError);
  CHECK_THROWS_AS(EstimatorTuple(0.0, 1.0, 1.0, 1.0, 0.5, 0), DomainError);
  CHECK_NOTHROW(EstimatorTuple(0.3, 0.3, 1.0, 1.0, 1.0, 1));
}

TEST_CASE("covers uses closed endpoints") {
  const Interval ci(0.0, 1.0);
  CHECK(covers(ci, 0.0));
  CHECK(covers(ci, 1.0));
  CHECK(covers(ci, 0.5));
  CHECK_FALSE(covers(ci, 1.0000001));
  CHECK_FALSE(covers(ci, -1e-9));
  CHECK_THROWS_AS(Interval(1.0, 0.0), DomainError);
}

TEST_CASE("build_ci1 reference cases") {
  SECTION("point-identified tuple uses the two-sided quantile") {
    const EstimatorTuple est(0.0, 0.0, 1.0, 1.0, 1.0, 100);
    const Interval ci = build_ci1(est, Alpha(0.05));
    CHECK_THAT(ci.lo, WithinAbs(-0.1959963985, 1e-4));
    CHECK_THAT(ci.hi, WithinAbs(0.1959963985, 1e-4));
  }
  SECTION("wide interval reaches the one-sided limit") {
    const EstimatorTuple est(0.0, 1.0, 1.0, 1.0, 1.0, 10000);
    const Interval ci = build_ci1(est, Alpha(0.05));
    const double z95 = norm_quantile(0.95);
    CHECK_THAT(ci.lo, WithinAbs(-z95 / 100.0, 1e-6));
    CHECK_THAT(ci.hi, WithinAbs(1.0 + z95 / 100.0, 1e-6));
  }
  SECTION("endpoints match an independently bisected critical value") {
    const EstimatorTuple est(0.0, 0.2, 1.0, 2.0, 0.3, 100);
    const Interval ci = build_ci1(est, Alpha(0.05));
    const double c = oracle::bisect_c1(10.0 * 0.2, 1.0, 2.0, 0.05);
    CHECK_THAT(ci.lo, WithinAbs(0.0 - 1.0 * c / 10.0, 1e-8));
    CHECK_THAT(ci.hi, WithinAbs(0.2 + 2.0 * c / 10.0, 1e-8));
  }
}

TEST_CASE("build_ci2 reference cases") {
  SECTION("point-identified comonotone tuple equals CI1") {
    const EstimatorTuple est(0.0, 0.0, 1.0, 1.0, 1.0, 100);
    const Interval c1 = build_ci1(est, Alpha(0.05));
    const Interval c2 = build_ci2(est, Alpha(0.05));
    CHECK_THAT(c2.lo, WithinAbs(c1.lo, 1e-6));
    CHECK_THAT(c2.hi, WithinAbs(c1.hi, 1e-6));
  }
  SECTION("huge estimated length gives one-sided width per side") {
    const EstimatorTuple est(0.0, 50.0, 1.0, 1.4, 0.2, 400);
    const Interval ci = build_ci2(est, Alpha(0.05));
    const double z95 = norm_quantile(0.95);
    CHECK_THAT(0.0 - ci.lo, WithinAbs(1.0 * z95 / 20.0, 1e-6));
    CHECK_THAT(ci.hi - 50.0, WithinAbs(1.4 * z95 / 20.0, 1e-6));
  }
  SECTION("general tuple matches the grid-search oracle objective") {
    const EstimatorTuple est(0.0, 0.3, 1.0, 1.2, 0.5, 400);
    const Interval ci = build_ci2(est, Alpha(0.05));
    const double delta = 20.0 * 0.3;
    const auto grid = oracle::grid_search_c2(delta, 1.0, 1.2, 0.5, 0.05);
    REQUIRE(grid.found);
    // sigma_l*c_l + sigma_u*c_u recovered from the endpoint extensions
    const double solver_obj = (0.0 - ci.lo) * 20.0 + (ci.hi - 0.3) * 20.0;
    CHECK_THAT(solver_obj, WithinAbs(grid.objective, 5e-3));
  }
}

TEST_CASE("interval containment and ordering properties") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> th(-2.0, 2.0);
  std::uniform_real_distribution<double> len(0.0, 1.5);
  std::uniform_real_distribution<double> sig(0.5, 2.0);
  std::uniform_real_distribution<double> corr(-1.0, 1.0);
  const Alpha alpha(0.05);

  for (int i = 0; i < 40; ++i) {
    const double tl = th(gen);
    const double tu = tl + len(gen);
    const EstimatorTuple est(tl, tu, sig(gen), sig(gen), corr(gen), 250);
    const Interval c1 = build_ci1(est, alpha);
    const Interval c2 = build_ci2(est, alpha);

    // both contain the estimated interval
    CHECK(c1.lo <= tl);
    CHECK(c1.hi >= tu);
    CHECK(c2.lo <= tl);
    CHECK(c2.hi >= tu);

    // the bivariate-calibrated interval is never longer
    CHECK(c2.length() <= c1.length() + 1e-8);
  }
}

TEST_CASE("builders are scale equivariant and deterministic") {
  const Alpha alpha(0.10);
  const EstimatorTuple base(-0.4, 0.5, 0.9, 1.3, 0.25, 320);
  const Interval c1 = build_ci1(base, alpha);
  const Interval c2 = build_ci2(base, alpha);

  for (double k : {0.5, 2.0, 7.3}) {
    const EstimatorTuple scaled(-0.4 * k, 0.5 * k, 0.9 * k, 1.3 * k, 0.25, 320);
    const Interval s1 = build_ci1(scaled, alpha);
    const Interval s2 = build_ci2(scaled, alpha);
    CHECK_THAT(s1.lo / k, WithinAbs(c1.lo, 1e-10 * std::abs(c1.lo)));
    CHECK_THAT(s1.hi / k, WithinAbs(c1.hi, 1e-10 * std::abs(c1.hi)));
    CHECK_THAT(s2.lo / k, WithinAbs(c2.lo, 1e-9 * std::abs(c2.lo)));
    CHECK_THAT(s2.hi / k, WithinAbs(c2.hi, 1e-9 * std::abs(c2.hi)));
  }

  const Interval r1 = build_ci1(base, alpha);
  const Interval r2 = build_ci2(base, alpha);
  CHECK(r1.lo == c1.lo);
  CHECK(r1.hi == c1.hi);
  CHECK(r2.lo == c2.lo);
  CHECK(r2.hi == c2.hi);
}
