// Small dense block-diagonal semidefinite programs in LMI form:
//
//   maximize / minimize   c^T x + offset
//   subject to            C_b + sum_v x_v A_{v,b}  is PSD   for every block b
//                         x_v >= 0                          for nonneg variables
//
// solved together with their dual by a primal-dual interior-point method.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace twodist {

enum class Sense { maximize, minimize };
enum class VarSign { nonneg, free };

struct ConicVariable {
  std::string name;
  VarSign sign = VarSign::free;
};

struct LmiTerm {
  std::size_t var = 0;
  Eigen::MatrixXd coeff;
};

struct LmiBlock {
  std::string name;
  Eigen::MatrixXd constant;
  std::vector<LmiTerm> terms;

  Eigen::Index size() const { return constant.rows(); }
  /// Coefficient matrix of variable v, or nullptr when v does not appear.
  const Eigen::MatrixXd* coeff_of(std::size_t var) const;
};

struct ConicObjective {
  Sense sense = Sense::maximize;
  std::vector<double> coeffs;
  double offset = 0.0;
};

class ConicProblem {
 public:
  std::size_t add_variable(std::string name, VarSign sign);
  /// Adds a block with the given constant matrix (must be symmetric).
  std::size_t add_block(std::string name, Eigen::MatrixXd constant);
  /// Adds coeff to the matrix multiplying `var` in `block`.
  void add_term(std::size_t block, std::size_t var, const Eigen::MatrixXd& coeff);
  /// constant + sum coeff_v x_v >= 0 as a 1x1 block.
  std::size_t add_scalar_inequality(std::string name, double constant,
                                    const std::vector<std::pair<std::size_t, double>>& coeffs);
  void set_objective(Sense sense, std::vector<double> coeffs, double offset = 0.0);

  const std::vector<ConicVariable>& variables() const { return variables_; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }
  const ConicObjective& objective() const { return objective_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_nonneg() const;

  /// C_b + sum_v x_v A_{v,b}.
  Eigen::MatrixXd slack(std::size_t block, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;

  /// Throws std::invalid_argument on shape mismatches or asymmetric matrices.
  void validate() const;

 private:
  std::vector<ConicVariable> variables_;
  std::vector<LmiBlock> blocks_;
  ConicObjective objective_;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iters = 200;
  /// Per-iteration progress lines on stderr.
  bool verbose = false;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  /// c^T x + offset at the returned x.
  double objective_value = 0.0;
  /// Objective of the dual multipliers, the side that bounds objective_value.
  double dual_objective = 0.0;
  std::vector<double> variable_values;
  /// One PSD multiplier per LMI block.
  std::vector<Eigen::MatrixXd> dual_matrices;
  /// Multiplier of x_v >= 0 (zero for free variables).
  std::vector<double> sign_multipliers;
  /// (dual_objective - objective_value) / max(1, |objective|, |dual objective|), signed so >= 0 is consistent.
  double duality_gap = 0.0;
  double max_residual = 0.0;
  int iterations = 0;
  std::string message;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts = {});

/// Residuals recomputed from scratch. Scale-dependent quantities are divided by
/// max(1, |objective|, |dual objective|); eigenvalues by max(1, max |entry|).
struct ResidualReport {
  double slack_infeasibility = 0.0;      ///< negative part of min eigenvalue of C + sum x A
  double multiplier_infeasibility = 0.0; ///< negative part of min eigenvalue of dual matrices
  double sign_infeasibility = 0.0;       ///< negative part of nonneg x and sign multipliers
  double dual_equality = 0.0;            ///< max |c_v + sum_b <A_{v,b}, X_b> + s_v|
  double complementarity = 0.0;          ///< max over blocks of |tr(X Z + Z X)|, zero iff X Z = 0 for PSD pairs
  double gap = 0.0;                      ///< |dual objective - objective|
  double max_residual = 0.0;
  bool ok = false;
  std::vector<std::string> violations;
};

ResidualReport check_certificate(const ConicProblem& problem, const ConicSolution& solution, double tol);

}  // namespace twodist
