#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "json.hpp"
#include "twodist/pipeline.hpp"

using namespace twodist;

TEST_CASE("k range") {
  CHECK(k_range(23) == std::vector<int>{2, 3});
  CHECK(k_range(7) == std::vector<int>{2});
  CHECK(k_range(50) == std::vector<int>{2, 3, 4, 5});
  for (int n = 7; n <= 100; ++n) CHECK_FALSE(k_range(n).empty());
}

TEST_CASE("harmonic bound and known values") {
  CHECK(harmonic_bound(22) == 275);
  CHECK(harmonic_bound(2) == 5);
  CHECK(harmonic_bound(94) == 4559);
  const long long known[] = {5, 6, 10, 16, 27};
  for (int n = 2; n <= 6; ++n) {
    CHECK(known_value(n) == known[n - 2]);
    const auto r = upper_bound(n);
    CHECK(r.final_upper == known[n - 2]);
    CHECK(r.rigor == "known");
  }
  CHECK_FALSE(known_value(7).has_value());
  CHECK_THROWS_AS(upper_bound(1), std::invalid_argument);
}

TEST_CASE("LP protocol at n = 7") {
  const double v = lp_protocol(7);
  CHECK(std::abs(std::floor(v) - 28) <= 1);
}

TEST_CASE("sweep mode for a few dimensions") {
  PipelineConfig cfg;
  cfg.mode = BoundMode::sweep;
  cfg.sweep_grid = 41;
  for (int n : {8, 12, 30}) {
    const auto r = upper_bound(n, cfg);
    CHECK(r.rigor == "sweep");
    REQUIRE(r.final_upper.has_value());
    CHECK(*r.final_upper == static_cast<long long>(n) * (n + 1) / 2);
    CHECK(r.sdp_bound <= r.harmonic + 1e-6);
    const auto ks = k_range(n);
    CHECK(std::find(ks.begin(), ks.end(), r.winning_k) != ks.end());
    CHECK(std::isnan(r.certified_bound));
    CHECK(r.case_breakdown.at("a+b>=0") == r.lower_bound);
    CHECK(r.case_breakdown.at("b<a<0") == n + 1);
  }
}

TEST_CASE("certified mode dominates sweep mode") {
  PipelineConfig cfg;
  cfg.segments = 10;
  const auto r = upper_bound(7, cfg);
  CHECK(r.rigor == "certified");
  CHECK(r.sdp_column() == 28);
  CHECK(r.final_upper == 28);
  CHECK(r.winning_k == 2);
  CHECK(r.certified_bound >= r.sdp_bound - 1e-6);
  CHECK_FALSE(r.starred);
}

TEST_CASE("table output") {
  PipelineConfig cfg;
  cfg.mode = BoundMode::sweep;
  cfg.sweep_grid = 21;
  cfg.lp_grid = 101;
  const auto rows = table_generate(5, 8, cfg);
  REQUIRE(rows.size() == 4);
  std::ostringstream csv, js;
  write_table_csv(csv, rows);
  CHECK(csv.str().rfind("n,lp,sdp,certified,lower,k,rigor,starred\n5,", 0) == 0);
  write_table_json(js, rows);
  const auto j = nlohmann::json::parse(js.str());
  REQUIRE(j.size() == 4);
  for (const auto& row : j) {
    for (const char* key : {"n", "lp", "sdp", "certified", "lower", "k", "rigor", "starred"}) CHECK(row.contains(key));
  }
  CHECK(j[2]["n"] == 7);
  CHECK(j[2]["sdp"] == 28);
  CHECK(j[0]["rigor"] == "known");
  CHECK_THROWS_AS(table_generate(9, 8, cfg), std::invalid_argument);
}

TEST_CASE("LP column only up to n = 40") {
  BoundReport r;
  r.n = 41;
  r.lp_bound = 1000;
  r.sdp_bound = 341.5;
  r.certified_bound = NAN;
  r.mode = BoundMode::sweep;
  r.lower_bound = 861;
  std::ostringstream os;
  write_table_csv(os, {r});
  CHECK(os.str().find("\n41,,341,") != std::string::npos);
}

TEST_CASE("report writers") {
  PipelineConfig cfg;
  cfg.mode = BoundMode::sweep;
  cfg.sweep_grid = 11;
  const auto r = upper_bound(7, cfg);
  std::ostringstream text, js;
  write_report_text(text, r);
  CHECK(text.str().find("final_upper 28\n") != std::string::npos);
  write_report_json(js, r);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["final_upper"] == 28);
  CHECK(j["per_k"].size() == 1);
}
