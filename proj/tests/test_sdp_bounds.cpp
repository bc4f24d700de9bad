#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "twodist/constructions.hpp"
#include "twodist/sdp_bounds.hpp"

using namespace twodist;

TEST_CASE("instances on the LRS line") {
  const auto inst = TwoDistanceInstance::on_lrs_line(23, 3, 0.2);
  CHECK(inst.b == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(inst.p == 5);
  CHECK_THROWS_AS(TwoDistanceInstance::on_lrs_line(23, 1, 0.2), std::invalid_argument);
  TwoDistanceInstance bad{23, 0.1, 0.3, std::nullopt, 5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(interval_end(3) == doctest::Approx(0.2));
}

TEST_CASE("LP bound is unbounded when no constraint binds") {
  // Both inner products close to 1 make every G_i positive.
  TwoDistanceInstance inst{10, 0.99, 0.98, std::nullopt, 5};
  CHECK(std::isinf(lp_bound(inst)));
}

TEST_CASE("LP vertex enumeration agrees with the conic solver") {
  for (double a : {0.0, 0.1, 0.2, 0.3}) {
    const auto inst = TwoDistanceInstance::on_lrs_line(7, 2, a, 5);
    const double v = lp_bound(inst);
    const auto s = solve(build_lp_conic(inst));
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(v).epsilon(1e-7));
  }
}

TEST_CASE("primal SDP layout") {
  const int p = 5;
  const auto prob = build_primal_sdp(TwoDistanceInstance::on_lrs_line(23, 3, 0.1, p));
  CHECK(prob.num_variables() == 6);
  CHECK(prob.num_nonneg() == 6);
  CHECK(prob.blocks().size() == static_cast<std::size_t>(1 + p + (p + 1)));
  CHECK(prob.blocks()[1 + p].size() == p + 1);
  for (int i = 1; i <= p; ++i) CHECK(prob.blocks()[static_cast<std::size_t>(1 + p + i)].constant.isZero(0.0));
}

TEST_CASE("SDP values at reference points") {
  CHECK(sdp_value(23, 3, 0.2) == doctest::Approx(276.0).epsilon(1e-6));
  const auto pts = sweep(7, 2, 5, 21);
  CHECK(sweep_max(pts) == doctest::Approx(28.0).epsilon(0.5 / 28));
  // The peak at a = 1/6 is sharp; 31 points put it on the grid.
  const auto pts22 = sweep(22, 3, 5, 31);
  CHECK(std::abs(sweep_max(pts22) - 275.0) <= 0.5);
}

TEST_CASE("sweep grid and ordering") {
  const auto two = sweep(23, 3, 5, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].a == 0.0);
  CHECK(two[1].a == 0.2);
  const auto pts = sweep(23, 3, 5, 11, {}, 3);
  REQUIRE(pts.size() == 11);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].a > pts[i - 1].a);
  CHECK(pts.front().value <= pts.back().value);
  double best = -1;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].value > best) {
      best = pts[i].value;
      arg = i;
    }
  }
  CHECK(arg == pts.size() - 1);
  const auto serial = sweep(23, 3, 5, 11, {}, 1);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(serial[i].value == pts[i].value);
  std::ostringstream os;
  write_sweep_csv(os, two);
  CHECK(os.str().rfind("a,sdp_value,status\n0,", 0) == 0);
  CHECK_THROWS_AS(sweep(23, 3, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(sdp_value(23, 3, 0.25), std::invalid_argument);
}

TEST_CASE("SDP below LP and monotone in p") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 7 + static_cast<int>(rng() % 20);
    const int k = 2 + static_cast<int>(rng() % 2);
    const double a = interval_end(k) * static_cast<double>(rng() % 1000) / 1000.0;
    const auto inst = TwoDistanceInstance::on_lrs_line(n, k, a, 5);
    const double sdp = solve_primal_sdp(inst).value;
    CHECK(sdp <= lp_bound(inst) + 1e-6);
    double prev = INFINITY;
    for (int p = 2; p <= 5; ++p) {
      const double v = sdp_value(n, k, a, p);
      CHECK(v <= prev + 1e-6 * std::max(1.0, prev));
      prev = v;
    }
  }
}

TEST_CASE("optimal solutions pass the certificate check") {
  for (auto [n, k, a] : {std::tuple{23, 3, 0.2}, {40, 2, 0.15}, {13, 3, 0.18}, {50, 4, 0.1}}) {
    const auto prob = build_primal_sdp(TwoDistanceInstance::on_lrs_line(n, k, a, 5));
    const auto s = solve(prob);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(check_certificate(prob, s, 1e-7).ok);
  }
}

TEST_CASE("SDP is at least the size of the simplex midpoint construction") {
  for (int n : {7, 9, 12, 15}) {
    const double a = (n - 3.0) / (2.0 * n - 2.0);
    const double b = -2.0 / (n - 1.0);
    TwoDistanceInstance inst{n, a, b, 2, 5};
    const double value = solve_primal_sdp(inst).value;
    const auto ps = simplex_midpoint_set(n);
    CHECK(value >= static_cast<double>(ps.size()) - 1e-4);
  }
}
