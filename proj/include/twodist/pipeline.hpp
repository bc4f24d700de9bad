// Per-dimension upper bounds on spherical two-distance sets: the case split
// a + b >= 0 / a in I_k / b < a < 0, with the I_k cases bounded by the SDP.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twodist/conic.hpp"
#include "twodist/sos_certifier.hpp"

namespace twodist {

enum class BoundMode { sweep, certified };

std::string to_string(BoundMode m);
/// Throws std::invalid_argument for anything but "sweep" or "certified".
BoundMode parse_bound_mode(const std::string& s);

struct PipelineConfig {
  int p = 5;
  BoundMode mode = BoundMode::certified;
  /// Primal grid per I_k; also the lower estimate that drives refinement.
  int sweep_grid = 101;
  /// Initial uniform segments per I_k.
  int segments = 20;
  /// Refinement stops once the worst segment is within this of the lower estimate.
  double refine_tol = 0.05;
  /// Extra segments bisection may add, over all k.
  int refine_budget = 200;
  int lp_grid = 1001;
  int jobs = 1;
  SolverOptions solver;
  CertifyOptions certify;
};

struct KBound {
  int k = 0;
  double sweep_max = 0.0;
  double a_at_max = 0.0;
  /// NaN in sweep mode, +infinity when some segment failed.
  double certified = 0.0;
  int segments = 0;
  bool all_ok = false;
};

struct BoundReport {
  int n = 0;
  int p = 5;
  BoundMode mode = BoundMode::certified;
  double lp_bound = 0.0;
  /// Max over k of the primal sweep maxima.
  double sdp_bound = 0.0;
  /// Max over k of the segment certificates; NaN in sweep mode.
  double certified_bound = 0.0;
  /// Absent when the I_k bound is infinite or failed.
  std::optional<long long> final_upper;
  long long lower_bound = 0;
  long long harmonic = 0;
  /// 0 when no k applies (n < 7).
  int winning_k = 0;
  std::map<std::string, double> case_breakdown;
  std::vector<KBound> per_k;
  /// "known", "sweep", "certified" or "uncertified".
  std::string rigor;
  bool starred = false;
  std::string error;

  /// The I_k bound used for final_upper: certified in certified mode, sweep otherwise.
  double ik_bound() const;
  /// floor(ik_bound + 1e-6), absent when not finite.
  std::optional<long long> sdp_column() const;
};

/// {2, ..., floor((1 + sqrt(2n))/2)}.
std::vector<int> k_range(int n);

/// n(n + 3)/2.
long long harmonic_bound(int n);

/// Exact g(n) for n = 2..6, absent otherwise.
std::optional<long long> known_value(int n);

/// Max over k in k_range(n) and a uniform grid of each closed I_k of the LP bound.
double lp_protocol(int n, int p = 5, int grid = 1001);

/// Throws std::invalid_argument when n < 2. Solver and certification failures are
/// recorded in the report (rigor "uncertified", error text), not thrown.
BoundReport upper_bound(int n, const PipelineConfig& config = {});

/// One report per n; per-row failures land in BoundReport::error.
std::vector<BoundReport> table_generate(int n_from, int n_to, const PipelineConfig& config = {});

/// Columns n,lp,sdp,certified,lower,k,rigor,starred; lp only for n <= 40.
void write_table_csv(std::ostream& out, const std::vector<BoundReport>& rows);
void write_table_json(std::ostream& out, const std::vector<BoundReport>& rows);
/// "key value" lines with every field of the report.
void write_report_text(std::ostream& out, const BoundReport& r);
void write_report_json(std::ostream& out, const BoundReport& r);

}  // namespace twodist
