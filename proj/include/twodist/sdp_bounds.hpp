// Linear-programming and three-point semidefinite bounds for a fixed pair of
// inner products (a, b).
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twodist/conic.hpp"

namespace twodist {

struct TwoDistanceInstance {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  std::optional<int> k;
  int p = 5;

  /// Instance on the Larman-Rogers-Seidel line b = (k a - 1)/(k - 1).
  static TwoDistanceInstance on_lrs_line(int n, int k, double a, int p = 5);
  /// Throws std::invalid_argument unless -1 <= b < a < 1, n >= 3, p >= 1.
  void validate() const;
  std::string describe() const;
};

/// Raised when the interior-point method cannot certify an instance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, SolveStatus status) : std::runtime_error(what), status_(status) {}
  SolveStatus status() const { return status_; }

 private:
  SolveStatus status_;
};

/// Right end 1/(2k - 1) of the interval I_k of admissible a.
double interval_end(int k);

/// max 1 + alpha_1 + alpha_2 subject to 1 + alpha_1 G_i(a) + alpha_2 G_i(b) >= 0,
/// i = 1..p, alpha >= 0, by vertex enumeration. +infinity when unbounded.
double lp_bound(const TwoDistanceInstance& inst);

/// The LP above as a diagonal conic problem in (alpha_1, alpha_2).
ConicProblem build_lp_conic(const TwoDistanceInstance& inst);

/// Three-point SDP in x_1..x_6 >= 0: objective (x_1 + x_2)/3 with offset 1.
ConicProblem build_primal_sdp(const TwoDistanceInstance& inst);

struct SdpResult {
  double value = 0.0;  ///< 1 + (x_1 + x_2)/3, +infinity when unbounded
  ConicSolution solution;
};

/// Solves build_primal_sdp(inst); throws SolverFailure on infeasible or failed solves.
SdpResult solve_primal_sdp(const TwoDistanceInstance& inst, const SolverOptions& opts = {});

/// SDP(a) on the LRS line; requires k >= 2 and a in the closed interval [0, 1/(2k-1)].
double sdp_value(int n, int k, double a, int p = 5, const SolverOptions& opts = {});

struct SweepPoint {
  double a = 0.0;
  double value = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
};

/// SDP(a) at grid_points uniformly spaced values of a in [0, 1/(2k-1)].
/// Failed points are recorded with their status and a NaN value.
std::vector<SweepPoint> sweep(int n, int k, int p, int grid_points, const SolverOptions& opts = {}, int jobs = 1);

/// Largest successful value of a sweep, or NaN when every point failed.
double sweep_max(const std::vector<SweepPoint>& points);

/// CSV with header "a,sdp_value,status" and 17 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace twodist
