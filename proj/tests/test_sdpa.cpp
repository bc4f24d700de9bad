#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "twodist/sdp_bounds.hpp"
#include "twodist/sdpa.hpp"

using namespace twodist;

namespace {

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '*') out.push_back(line);
  }
  return out;
}

ConicProblem trivial() {
  ConicProblem p;
  auto x = p.add_variable("x", VarSign::nonneg);
  p.add_scalar_inequality("cap", 1.0, {{x, -1.0}});
  p.set_objective(Sense::maximize, {1.0});
  return p;
}

void check_round_trip(const ConicProblem& prob) {
  const std::string text = export_sdpa(prob);
  const ConicProblem back = import_sdpa(text);
  REQUIRE(back.num_variables() == prob.num_variables());
  REQUIRE(back.blocks().size() == prob.blocks().size());
  for (std::size_t v = 0; v < prob.num_variables(); ++v) {
    CHECK(back.variables()[v].sign == prob.variables()[v].sign);
    CHECK(back.objective().coeffs[v] == prob.objective().coeffs[v]);
  }
  CHECK(back.objective().sense == prob.objective().sense);
  CHECK(back.objective().offset == prob.objective().offset);
  for (std::size_t b = 0; b < prob.blocks().size(); ++b) {
    const auto& x = prob.blocks()[b];
    const auto& y = back.blocks()[b];
    REQUIRE(x.size() == y.size());
    CHECK((x.constant - y.constant).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t v = 0; v < prob.num_variables(); ++v) {
      const auto* cx = x.coeff_of(v);
      const auto* cy = y.coeff_of(v);
      const bool zx = cx == nullptr || cx->isZero(0.0);
      const bool zy = cy == nullptr || cy->isZero(0.0);
      CHECK(zx == zy);
      if (!zx && !zy) CHECK((*cx - *cy).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  const auto s0 = solve(prob), s1 = solve(back);
  REQUIRE(s0.status == SolveStatus::optimal);
  REQUIRE(s1.status == SolveStatus::optimal);
  CHECK(s1.objective_value == doctest::Approx(s0.objective_value).epsilon(1e-9));
}

}  // namespace

TEST_CASE("trivial problem layout") {
  const auto lines = data_lines(export_sdpa(trivial()));
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "1");
  CHECK(lines[1] == "1");
  CHECK(lines[2] == "-2");
  CHECK(lines[3] == "-1");
  CHECK(lines[4] == "0 1 1 1 -1");
  CHECK(lines[5] == "1 1 1 1 -1");
  CHECK(lines[6] == "1 1 2 2 1");
}

TEST_CASE("free variables are split and noted") {
  ConicProblem p;
  auto x = p.add_variable("x", VarSign::free);
  auto b = p.add_block("det", Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd off(2, 2);
  off << 0, 1, 1, 0;
  p.add_term(b, x, off);
  p.set_objective(Sense::maximize, {2.0});
  const std::string text = export_sdpa(p);
  CHECK(text.find("* free 0 1 2") != std::string::npos);
  const auto lines = data_lines(text);
  CHECK(lines[0] == "2");
  CHECK(lines[2] == "2 -2");
  CHECK(lines[3] == "-2 2");
  check_round_trip(p);
}

TEST_CASE("LP instance exports only diagonal blocks") {
  const auto prob = build_lp_conic(TwoDistanceInstance::on_lrs_line(7, 2, 0.25, 5));
  const auto lines = data_lines(export_sdpa(prob));
  CHECK(lines[1] == "1");
  std::istringstream sizes(lines[2]);
  long s;
  int count = 0;
  while (sizes >> s) {
    CHECK(s < 0);
    ++count;
  }
  CHECK(count == 1);
  check_round_trip(prob);
}

TEST_CASE("round trip on representative instances") {
  check_round_trip(trivial());
  check_round_trip(build_primal_sdp(TwoDistanceInstance::on_lrs_line(7, 2, 0.25, 5)));
  check_round_trip(build_primal_sdp(TwoDistanceInstance::on_lrs_line(23, 3, 0.2, 3)));
}

TEST_CASE("plain SDPA input without a header") {
  // The standard small example: min 48 x1 - 8 x2 + 20 x3 with one 2x2 block.
  const std::string text =
      "\"Example 1\"\n"
      "3 = mDIM\n1 = nBLOCK\n2 = bLOCKsTRUCT\n{48, -8, 20}\n"
      "0 1 1 1 -11\n0 1 2 2 23\n1 1 1 1 10\n1 1 1 2 4\n2 1 2 2 -8\n3 1 1 2 -8\n3 1 2 2 -2\n";
  const auto prob = import_sdpa(text);
  CHECK(prob.num_variables() == 3);
  CHECK(prob.objective().sense == Sense::minimize);
  const auto s = solve(prob);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(-41.9).epsilon(1e-7));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(import_sdpa(""), std::invalid_argument);
  CHECK_THROWS_AS(import_sdpa("1\n1\n2\n1\n0 2 1 1 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(import_sdpa("1\n1\n-2\n1\n0 1 1 2 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(import_sdpa("1\n1\n2\n1\n0 1 3 1 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(import_sdpa("1\n1\n2\n1\n0 1 1 1 x\n"), std::invalid_argument);
}
