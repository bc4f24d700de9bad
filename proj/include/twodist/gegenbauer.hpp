#pragma once

#include <vector>

#include "twodist/poly.hpp"

namespace twodist {

/// Gegenbauer polynomials G_k^{(n)}, normalized so that G_k^{(n)}(1) = 1, for
/// k = 0..max_degree. Coefficients are exact; evaluation is double Horner.
class GegenbauerTable {
 public:
  /// Builds the table from the three-term recursion
  ///   G_k = ((2k + n - 4) t G_{k-1} - (k - 1) G_{k-2}) / (k + n - 3).
  /// Throws std::invalid_argument when n < 2 or max_degree < 0.
  GegenbauerTable(int n, int max_degree = 5);

  int dimension() const { return n_; }
  int max_degree() const { return static_cast<int>(polys_.size()) - 1; }

  /// Exact G_k^{(n)}; throws std::out_of_range for k outside [0, max_degree].
  const UniPoly& poly(int k) const;
  double eval(int k, double t) const;
  Rational eval_exact(int k, const Rational& t) const { return poly(k).eval(t); }

 private:
  int n_;
  std::vector<UniPoly> polys_;
  std::vector<std::vector<double>> numeric_;
};

}  // namespace twodist
