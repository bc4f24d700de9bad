// Dual of the three-point SDP along b = b_k(a), certified on whole segments of a
// by sum-of-squares conditions.
//
// Dual variables: alpha_1..alpha_p >= 0, beta (2x2) PSD, F_0..F_p PSD with F_i of
// size p - i + 1. Objective 1 + sum alpha + beta_11 + <F_0, S_0(1,1,1)>. Each of the
// six primal variables x_1..x_6 gives a constraint f(a) >= 0 that must hold for
// every a in the segment; it is imposed through f+ = X Q X^T with Q PSD.
#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "twodist/conic.hpp"
#include "twodist/poly.hpp"
#include "twodist/zonal.hpp"

namespace twodist {

/// f(a) = constant(a) + sum_B <coeff[B](a), X_B> over the dual blocks
/// B = beta, F_0..F_p, alpha_1..alpha_p (in that order).
struct DualPolynomial {
  std::string name;
  UniPoly constant;
  std::vector<UniPolyMatrix> coeff;
  /// Largest degree over the constant and every coefficient entry.
  int degree = 0;

  double eval(double a, const std::vector<Eigen::MatrixXd>& dual_blocks) const;
};

/// Sizes of the dual blocks in DualPolynomial order.
std::vector<int> dual_block_sizes(int p);

/// The six families: (a,a,1), (b,b,1), (a,a,a), (a,a,b), (a,b,b), (b,b,b).
std::vector<DualPolynomial> build_dual_polynomials(int n, int k, int p);

struct DualVariables {
  std::vector<double> alpha;
  Eigen::Matrix2d beta = Eigen::Matrix2d::Zero();
  std::vector<Eigen::MatrixXd> F;

  /// Blocks in DualPolynomial order.
  std::vector<Eigen::MatrixXd> blocks() const;
  double objective(const Eigen::MatrixXd& s0_at_ones) const;
};

struct SegmentCertificate {
  int n = 0, k = 0, p = 0;
  Rational a1, a2;
  /// Upper bound on SDP(a) for a in [a1, a2]; +infinity when nothing was certified.
  double bound = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  DualVariables dual;
  std::vector<Eigen::MatrixXd> Q;
  /// Per family: max over degrees of |coeff(X Q X^T) - coeff(f+)|, relative to the row magnitude.
  std::vector<double> residuals;
  /// Per family: min of f over a 1000-point grid of the segment.
  std::vector<double> pointwise_min;
  /// Smallest eigenvalue over beta, F_i, alpha and Q.
  double min_eigenvalue = 0.0;
  int iterations = 0;
  bool checks_passed = false;
  std::string message;

  /// Solver optimal and every independent check passed.
  bool ok() const { return status == SolveStatus::optimal && checks_passed; }
};

struct CertifyOptions {
  SolverOptions solver;
  /// Accepted f(a) on the segment grid.
  double pointwise_tol = 1e-6;
  /// Accepted coefficient-matching residual.
  double residual_tol = 1e-7;
  int grid_points = 1000;
};

/// Precomputed pieces shared by every segment of one (n, k, p).
class SegmentCertifier {
 public:
  SegmentCertifier(int n, int k, int p);

  int n() const { return n_; }
  int k() const { return k_; }
  int p() const { return p_; }
  const std::vector<DualPolynomial>& families() const { return families_; }

  /// Certification SDP on [a1, a2], as the LMI problem in the row multipliers:
  /// its dual_matrices are (beta, F_0..F_p, alpha_1..alpha_p, Q_1..Q_6), and its
  /// dual_objective is the bound.
  ConicProblem build_problem(const Rational& a1, const Rational& a2) const;

  SegmentCertificate certify(const Rational& a1, const Rational& a2, const CertifyOptions& opts = {}) const;

 private:
  // One coefficient-matching equality: sum_{i+j=d} Q_ij = rhs + sum value * X_B(r, s).
  struct Row {
    std::size_t family;
    int degree;
    double rhs;
    struct Term {
      std::size_t block;
      int r, s;
      double value;
    };
    std::vector<Term> terms;
  };
  std::vector<Row> rows(const Rational& a1, const Rational& a2) const;
  ConicProblem problem_from_rows(const std::vector<Row>& rows) const;

  int n_, k_, p_;
  std::vector<DualPolynomial> families_;
  Eigen::MatrixXd s0_ones_;
};

/// Requires 0 <= a1 < a2 <= 1/(2k - 1).
SegmentCertificate certify_segment(int n, int k, int p, const Rational& a1, const Rational& a2,
                                   const CertifyOptions& opts = {});

struct IntervalCertificate {
  /// Max over segments; +infinity if any segment failed.
  double bound = 0.0;
  bool all_ok = false;
  std::vector<SegmentCertificate> per_segment;
};

/// Uniform split of [0, 1/(2k - 1)] into num_segments exact rational pieces.
IntervalCertificate certify_interval(int n, int k, int p, int num_segments, const CertifyOptions& opts = {},
                                     int jobs = 1);

/// JSON dump with everything needed to re-verify the certificate.
void write_certificate_json(std::ostream& out, const IntervalCertificate& cert);
std::string certificate_json(const SegmentCertificate& cert);

}  // namespace twodist
