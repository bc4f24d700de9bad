#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "json.hpp"
#include "twodist/sdp_bounds.hpp"
#include "twodist/sos_certifier.hpp"

using namespace twodist;

namespace {

std::vector<Eigen::MatrixXd> zero_blocks(int p) {
  std::vector<Eigen::MatrixXd> out;
  for (int s : dual_block_sizes(p)) out.push_back(Eigen::MatrixXd::Zero(s, s));
  return out;
}

}  // namespace

TEST_CASE("six families with the expected shapes") {
  const int p = 5;
  const auto fams = build_dual_polynomials(23, 3, p);
  REQUIRE(fams.size() == 6);
  const auto sizes = dual_block_sizes(p);
  CHECK(sizes.size() == static_cast<std::size_t>(1 + (p + 1) + p));
  for (const auto& f : fams) {
    REQUIRE(f.coeff.size() == sizes.size());
    int deg = f.constant.degree();
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      REQUIRE(f.coeff[b].size() == static_cast<std::size_t>(sizes[b]));
      for (const auto& row : f.coeff[b]) {
        for (const auto& e : row) deg = std::max(deg, e.degree());
      }
    }
    CHECK(f.degree == deg);
    CHECK(f.degree <= 2 * p);
  }
}

TEST_CASE("the zero dual point violates the first family") {
  const auto fams = build_dual_polynomials(23, 3, 5);
  const auto zero = zero_blocks(5);
  for (double a : {0.0, 0.1, 0.2}) {
    CHECK(fams[0].eval(a, zero) == -1.0);
    CHECK(fams[1].eval(a, zero) == -1.0);
    CHECK(fams[2].eval(a, zero) == 0.0);
  }
}

TEST_CASE("constant coefficient of the second family for p = 1") {
  const int n = 10, k = 2;
  const auto fams = build_dual_polynomials(n, k, 1);
  const auto& f = fams[1];
  CHECK(f.constant.coeff(0) == -1);
  // beta enters as -2 b12 - b22.
  CHECK(f.coeff[0][0][1].coeff(0) == -1);
  CHECK(f.coeff[0][1][0].coeff(0) == -1);
  CHECK(f.coeff[0][1][1].coeff(0) == -1);
  CHECK(f.coeff[0][0][0].is_zero());
  // alpha_1 enters as -G_1(b) = -b = -(2a - 1), constant part +1.
  CHECK(f.coeff[3][0][0].coeff(0) == 1);
  CHECK(f.coeff[3][0][0].coeff(1) == -2);
  // F_1 (1x1) enters as -3 S_1(b, b, 1); with G_1^{(n-1)}(x) = x this is -3 (1 - b^2), constant part -3 (1 - 1) = 0.
  const Rational b0 = -1;
  CHECK(f.coeff[2][0][0].coeff(0) == -3 * (1 - b0 * b0));
}

TEST_CASE("one segment equals the whole-interval certificate") {
  const auto whole = certify_segment(23, 3, 5, Rational(0), Rational(1, 5));
  const auto one = certify_interval(23, 3, 5, 1);
  REQUIRE(whole.ok());
  REQUIRE(one.all_ok);
  CHECK(one.bound == whole.bound);
}

TEST_CASE("segment certificates dominate the primal and pass the independent checks") {
  const SegmentCertifier cert(23, 3, 5);
  for (auto [lo, hi] : {std::pair{Rational(19, 100), Rational(1, 5)}, {Rational(0), Rational(1, 100)}, {Rational(1, 10), Rational(3, 20)}}) {
    const auto c = cert.certify(lo, hi);
    REQUIRE(c.ok());
    for (double r : c.residuals) CHECK(r <= 1e-7);
    for (double m : c.pointwise_min) CHECK(m >= -1e-6);
    CHECK(c.dual.objective(zonal_set(23, 5)->eval(0, 1, 1, 1)) == doctest::Approx(c.bound).epsilon(1e-9));
    for (int j = 0; j < 10; ++j) {
      const double a = lo.get_d() + (hi.get_d() - lo.get_d()) * j / 9.0;
      CHECK(c.bound >= sdp_value(23, 3, a) - 1e-6);
    }
  }
}

TEST_CASE("n = 7 on the whole of I_2") {
  const auto c = certify_interval(7, 2, 5, 10);
  REQUIRE(c.all_ok);
  CHECK(c.bound <= 28.9);
  CHECK(c.bound >= 28.0 - 1e-6);
}

TEST_CASE("finer partitions are weakly tighter") {
  const auto c5 = certify_interval(23, 3, 5, 5);
  const auto c10 = certify_interval(23, 3, 5, 10);
  REQUIRE(c5.all_ok);
  REQUIRE(c10.all_ok);
  CHECK(c10.bound <= c5.bound + 1e-6);
  for (std::size_t i = 0; i < 5; ++i) {
    const double coarse = c5.per_segment[i].bound;
    CHECK(std::max(c10.per_segment[2 * i].bound, c10.per_segment[2 * i + 1].bound) <= coarse + 1e-6);
  }
}

TEST_CASE("segments outside I_k are rejected") {
  CHECK_THROWS_AS(certify_segment(23, 3, 5, Rational(1, 10), Rational(1, 4)), std::invalid_argument);
  CHECK_THROWS_AS(certify_segment(23, 3, 5, Rational(1, 10), Rational(1, 10)), std::invalid_argument);
  CHECK_THROWS_AS(certify_interval(23, 3, 5, 0), std::invalid_argument);
}

TEST_CASE("JSON dump carries the full certificate") {
  const auto c = certify_interval(7, 2, 3, 2);
  std::ostringstream os;
  write_certificate_json(os, c);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j["bound"].get<double>() == c.bound);
  REQUIRE(j["segments"].size() == 2);
  const auto& s = j["segments"][1];
  CHECK(s["segment_exact"][1] == "1/3");
  CHECK(s["alpha"].size() == 3);
  CHECK(s["F"].size() == 4);
  CHECK(s["Q"].size() == 6);
  CHECK(s["beta"]["b12"].get<double>() == c.per_segment[1].dual.beta(0, 1));
  const auto& q0 = s["Q"][0];
  const auto& Q = c.per_segment[1].Q[0];
  REQUIRE(q0["data"].size() == static_cast<std::size_t>(Q.size()));
  CHECK(q0["data"][1].get<double>() == Q(0, 1));
  CHECK(s["residuals"].size() == 6);
}
