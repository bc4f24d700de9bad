// Explicit spherical two-distance sets and checks on them.
#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twodist {

struct PointSet {
  int n = 0;
  std::vector<Eigen::VectorXd> points;

  std::size_t size() const { return points.size(); }
  /// Throws std::invalid_argument when a point has the wrong length or |norm - 1| > tol.
  void validate(double tol = 1e-10) const;
};

/// The n(n+1)/2 midpoints e_i + e_j (i < j) of the regular simplex in R^{n+1},
/// centered and written in an orthonormal basis of the hyperplane sum x = 0.
PointSet simplex_midpoint_set(int n);

/// n + 1 unit vectors with common inner product -1/n.
PointSet regular_simplex(int n);

enum class DistanceKind { two_distance, one_distance, many_distances, wide_cluster };

struct TwoDistanceCheck {
  bool ok = false;
  DistanceKind kind = DistanceKind::many_distances;
  /// Cluster centers, descending; a > b when ok.
  std::vector<double> centers;
  double a = 0.0;
  double b = 0.0;
  std::string message;
};

/// Groups all pairwise inner products by splitting the sorted list at gaps
/// larger than tol; ok iff exactly two groups, each of diameter <= tol.
TwoDistanceCheck verify_two_distance(const PointSet& ps, double tol = 1e-9);

/// Smallest k in k_range(n) with |b - (k a - 1)/(k - 1)| <= tol.
std::optional<int> lrs_k(double a, double b, int n, double tol = 1e-9);

/// "n m" then m lines of n coordinates at 17 significant digits.
void write_point_set(std::ostream& out, const PointSet& ps);
/// Throws std::invalid_argument on malformed files or non-unit points.
PointSet read_point_set(std::istream& in);

}  // namespace twodist
