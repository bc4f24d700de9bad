#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "twodist/constructions.hpp"
#include "twodist/sdp_bounds.hpp"

using namespace twodist;

TEST_CASE("simplex midpoints in dimension 5") {
  const auto ps = simplex_midpoint_set(5);
  CHECK(ps.size() == 15);
  const auto c = verify_two_distance(ps);
  REQUIRE(c.ok);
  CHECK(c.a == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c.b == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(lrs_k(c.a, c.b, 5) == 2);
}

TEST_CASE("simplex midpoints for n = 2..50") {
  for (int n = 2; n <= 50; ++n) {
    const auto ps = simplex_midpoint_set(n);
    CHECK(ps.size() == static_cast<std::size_t>(n * (n + 1) / 2));
    CHECK_NOTHROW(ps.validate(1e-10));
    const auto c = verify_two_distance(ps, 1e-9);
    if (n == 2) {
      // Three points of a triangle: one inner product.
      CHECK(c.kind == DistanceKind::one_distance);
      continue;
    }
    REQUIRE(c.ok);
    CHECK(std::abs(c.a - (n - 3.0) / (2.0 * n - 2.0)) <= 1e-9);
    CHECK(std::abs(c.b - (-2.0 / (n - 1.0))) <= 1e-9);
    CHECK(std::abs(c.b - (2 * c.a - 1)) <= 1e-9);
    CHECK((c.a + c.b >= 0) == (n >= 7));
  }
}

TEST_CASE("regular simplex is equidistant") {
  const auto c = verify_two_distance(regular_simplex(6));
  CHECK_FALSE(c.ok);
  CHECK(c.kind == DistanceKind::one_distance);
  REQUIRE(c.centers.size() == 1);
  CHECK(c.centers[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("random points have many distances") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  PointSet ps;
  ps.n = 4;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd x(4);
    for (int c = 0; c < 4; ++c) x(c) = g(rng);
    ps.points.push_back(x.normalized());
  }
  const auto c = verify_two_distance(ps);
  CHECK_FALSE(c.ok);
  CHECK(c.kind == DistanceKind::many_distances);
}

TEST_CASE("LRS index") {
  CHECK(lrs_k(0.25, -0.5, 5) == 2);
  CHECK(lrs_k(0.2, -0.2, 23) == 3);
  CHECK_FALSE(lrs_k(0.1, 0.05, 23).has_value());
  CHECK_THROWS_AS(lrs_k(0.1, 0.2, 23), std::invalid_argument);
}

TEST_CASE("the relaxation keeps the construction feasible") {
  for (int n : {7, 10, 20}) {
    const double a = (n - 3.0) / (2.0 * n - 2.0), b = -2.0 / (n - 1.0);
    const double v = solve_primal_sdp({n, a, b, 2, 5}).value;
    CHECK(v >= n * (n + 1) / 2.0 - 1e-4);
  }
}

TEST_CASE("point files") {
  const auto ps = simplex_midpoint_set(4);
  std::stringstream ss;
  write_point_set(ss, ps);
  CHECK(ss.str().rfind("4 10\n", 0) == 0);
  const auto back = read_point_set(ss);
  REQUIRE(back.size() == ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK((back.points[i] - ps.points[i]).norm() == 0.0);

  std::istringstream bad_norm("2 1\n1 1\n");
  CHECK_THROWS_AS(read_point_set(bad_norm), std::invalid_argument);
  std::istringstream short_file("2 2\n1 0\n");
  CHECK_THROWS_AS(read_point_set(short_file), std::invalid_argument);
  std::istringstream bad_header("x\n");
  CHECK_THROWS_AS(read_point_set(bad_header), std::invalid_argument);
}
