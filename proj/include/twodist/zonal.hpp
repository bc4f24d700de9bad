// Three-point zonal matrices Y_k^n and their symmetrizations S_k^n.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <vector>

#include "twodist/poly.hpp"

namespace twodist {

using TriPolyMatrix = std::vector<std::vector<TriPoly>>;
using UniPolyMatrix = std::vector<std::vector<UniPoly>>;

/// (Y_k^n)_{ij} in radical-free form:
///   u^i v^j sum_l g_l (t - uv)^(k-2l) ((1-u^2)(1-v^2))^l,
/// g_l the coefficient of x^(k-2l) in G_k^{(n-1)}(x). Valid on all of [-1,1]^3.
TriPoly y_entry_poly(int n, int k, int i, int j);

/// S_k^n as a (p-k+1) x (p-k+1) matrix of polynomials, averaged over the six
/// argument permutations.
TriPolyMatrix s_matrix_poly(int n, int p, int k);

/// S_0^n..S_p^n for one (n, p), with a double-precision copy of every entry
/// for fast evaluation.
class ZonalMatrixSet {
 public:
  ZonalMatrixSet(int n, int p);

  int dimension() const { return n_; }
  int order() const { return p_; }
  /// Side length p - k + 1 of S_k.
  int block_size(int k) const { return p_ - k + 1; }

  const TriPolyMatrix& poly(int k) const;
  Eigen::MatrixXd eval(int k, double u, double v, double t) const;
  /// Entry-wise exact substitution (u, v, t) -> affine forms in a.
  UniPolyMatrix substitute(int k, const std::array<AffineForm, 3>& uvt) const;

 private:
  struct Term {
    int i, j, l;
    double c;
  };
  int n_;
  int p_;
  std::vector<TriPolyMatrix> entries_;
  std::vector<std::vector<std::vector<std::vector<Term>>>> numeric_;
};

/// Shared, lazily built set for (n, p); safe to call from several threads.
std::shared_ptr<const ZonalMatrixSet> zonal_set(int n, int p);

/// Numeric S_k^n(u, v, t) through the polynomial form.
Eigen::MatrixXd s_matrix_eval(int n, int p, int k, double u, double v, double t);

}  // namespace twodist
