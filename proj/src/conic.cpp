#include "twodist/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace twodist {

// ------------------------------------------------------------- problem

const Eigen::MatrixXd* LmiBlock::coeff_of(std::size_t var) const {
  for (const auto& t : terms) {
    if (t.var == var) return &t.coeff;
  }
  return nullptr;
}

std::size_t ConicProblem::add_variable(std::string name, VarSign sign) {
  variables_.push_back({std::move(name), sign});
  objective_.coeffs.resize(variables_.size(), 0.0);
  return variables_.size() - 1;
}

std::size_t ConicProblem::add_block(std::string name, Eigen::MatrixXd constant) {
  if (constant.rows() != constant.cols() || constant.rows() == 0) {
    throw std::invalid_argument("LMI block '" + name + "' needs a nonempty square constant");
  }
  if (!(constant - constant.transpose()).isZero(1e-12 * std::max(1.0, constant.cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("LMI block '" + name + "' constant is not symmetric");
  }
  blocks_.push_back({std::move(name), std::move(constant), {}});
  return blocks_.size() - 1;
}

void ConicProblem::add_term(std::size_t block, std::size_t var, const Eigen::MatrixXd& coeff) {
  if (block >= blocks_.size()) throw std::out_of_range("LMI block index out of range");
  if (var >= variables_.size()) throw std::out_of_range("variable index out of range");
  auto& b = blocks_[block];
  if (coeff.rows() != b.size() || coeff.cols() != b.size()) {
    throw std::invalid_argument("coefficient shape does not match block '" + b.name + "'");
  }
  if (!(coeff - coeff.transpose()).isZero(1e-12 * std::max(1.0, coeff.cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("coefficient in block '" + b.name + "' is not symmetric");
  }
  for (auto& t : b.terms) {
    if (t.var == var) {
      t.coeff += coeff;
      return;
    }
  }
  b.terms.push_back({var, coeff});
}

std::size_t ConicProblem::add_scalar_inequality(std::string name, double constant,
                                                const std::vector<std::pair<std::size_t, double>>& coeffs) {
  std::size_t b = add_block(std::move(name), Eigen::MatrixXd::Constant(1, 1, constant));
  for (const auto& [v, c] : coeffs) {
    if (c != 0.0) add_term(b, v, Eigen::MatrixXd::Constant(1, 1, c));
  }
  return b;
}

void ConicProblem::set_objective(Sense sense, std::vector<double> coeffs, double offset) {
  if (coeffs.size() != variables_.size()) throw std::invalid_argument("objective length != number of variables");
  objective_ = {sense, std::move(coeffs), offset};
}

std::size_t ConicProblem::num_nonneg() const {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(), [](const auto& v) { return v.sign == VarSign::nonneg; }));
}

Eigen::MatrixXd ConicProblem::slack(std::size_t block, const std::vector<double>& x) const {
  const auto& b = blocks_.at(block);
  Eigen::MatrixXd s = b.constant;
  for (const auto& t : b.terms) s += x.at(t.var) * t.coeff;
  return s;
}

double ConicProblem::objective_value(const std::vector<double>& x) const {
  double v = objective_.offset;
  for (std::size_t i = 0; i < x.size(); ++i) v += objective_.coeffs[i] * x[i];
  return v;
}

void ConicProblem::validate() const {
  if (objective_.coeffs.size() != variables_.size()) throw std::invalid_argument("objective length mismatch");
  auto symmetric = [](const Eigen::MatrixXd& m) {
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
  };
  for (const auto& b : blocks_) {
    if (!symmetric(b.constant)) throw std::invalid_argument("constant of block '" + b.name + "' is not symmetric");
    for (const auto& t : b.terms) {
      if (t.var >= variables_.size()) throw std::invalid_argument("block '" + b.name + "' references unknown variable");
      if (t.coeff.rows() != b.size() || t.coeff.cols() != b.size()) {
        throw std::invalid_argument("coefficient shape mismatch in block '" + b.name + "'");
      }
      if (!symmetric(t.coeff)) throw std::invalid_argument("coefficient in block '" + b.name + "' is not symmetric");
    }
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

// ------------------------------------------------------------- solver

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Interior-point arithmetic runs in extended precision; the instances here are
// tiny but close to rank-deficient at the optimum.
using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using BlockMats = std::vector<Mat>;

Real inner(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }
double inner_d(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

Real inner(const BlockMats& a, const BlockMats& b) {
  Real s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += inner(a[i], b[i]);
  return s;
}

Real frob(const BlockMats& a) {
  Real s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Mat sym(const Mat& m) { return 0.5L * (m + m.transpose()); }
MatrixXd sym_d(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Standard-form pair with one equality constraint per problem variable:
//   (P) min <C, X>  s.t.  <A_i, X> = b_i,  X PSD
//   (D) max b^T y   s.t.  Z = C - sum_i y_i A_i PSD
// Each nonneg variable contributes its own 1x1 block.
struct StandardForm {
  std::vector<Index> sizes;
  BlockMats c;
  std::vector<std::vector<std::pair<std::size_t, Mat>>> a;  // per constraint: (block, matrix)
  std::vector<std::vector<std::size_t>> touching;                 // per block: constraints with entries there
  Vec b;
  std::size_t num_lmi_blocks = 0;
  std::vector<std::size_t> sign_block_of;  // per variable, npos for free
  std::vector<std::size_t> lmi_std;        // per problem block: standard block, npos if dropped
  std::vector<Mat> lmi_basis;              // per problem block: range basis, empty when unreduced
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Restricts a block to the joint range of its constant and coefficients. When
// they all vanish on a common subspace, Z does too for every x, so no strictly
// feasible point exists and the multiplier can drift along that subspace.
Mat block_range(const LmiBlock& blk) {
  const Index n = blk.size();
  std::vector<const Eigen::MatrixXd*> mats{&blk.constant};
  for (const auto& t : blk.terms) mats.push_back(&t.coeff);
  Mat stacked = Mat::Zero(n * static_cast<Index>(mats.size()), n);
  bool any = false;
  for (std::size_t q = 0; q < mats.size(); ++q) {
    const Real na = mats[q]->cwiseAbs().maxCoeff();
    if (na == 0.0) continue;
    any = true;
    stacked.middleRows(n * static_cast<Index>(q), n) = mats[q]->cast<Real>() / na;
  }
  if (!any) return Mat(n, 0);
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  Index rank = 0;
  while (rank < n && sv(rank) > 1e-11L * sv(0)) ++rank;
  return svd.matrixV().leftCols(rank);
}

StandardForm to_standard(const ConicProblem& p, Real sense_sign) {
  StandardForm f;
  const std::size_t m = p.num_variables();
  f.a.resize(m);
  f.b.resize(static_cast<Index>(m));
  for (std::size_t v = 0; v < m; ++v) f.b(static_cast<Index>(v)) = sense_sign * p.objective().coeffs[v];
  for (const auto& blk : p.blocks()) {
    Mat q = block_range(blk);
    if (q.cols() == 0) {
      // Identically zero: trivially PSD, multiplier zero.
      f.lmi_std.push_back(kNone);
      f.lmi_basis.push_back(q);
      continue;
    }
    const bool reduce = q.cols() < blk.size();
    auto compress = [&](const Eigen::MatrixXd& m0) {
      Mat r = m0.cast<Real>();
      return reduce ? sym(Mat(q.transpose() * r * q)) : r;
    };
    std::size_t idx = f.sizes.size();
    f.lmi_std.push_back(idx);
    f.lmi_basis.push_back(reduce ? q : Mat());
    f.sizes.push_back(reduce ? q.cols() : blk.size());
    f.c.push_back(compress(blk.constant));
    for (const auto& t : blk.terms) {
      Mat a = compress(t.coeff);
      if (a.cwiseAbs().maxCoeff() == 0.0) continue;
      f.a[t.var].emplace_back(idx, -a);
    }
  }
  f.num_lmi_blocks = f.sizes.size();
  f.sign_block_of.assign(m, kNone);
  for (std::size_t v = 0; v < m; ++v) {
    if (p.variables()[v].sign != VarSign::nonneg) continue;
    std::size_t idx = f.sizes.size();
    f.sign_block_of[v] = idx;
    f.sizes.push_back(1);
    f.c.push_back(Mat::Zero(1, 1));
    f.a[v].emplace_back(idx, -Mat::Identity(1, 1));
  }
  f.touching.resize(f.sizes.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& [blk, mat] : f.a[i]) f.touching[blk].push_back(i);
  }
  return f;
}

Vec apply_a(const StandardForm& f, const BlockMats& x) {
  Vec out(static_cast<Index>(f.a.size()));
  for (std::size_t i = 0; i < f.a.size(); ++i) {
    Real s = 0.0;
    for (const auto& [blk, mat] : f.a[i]) s += inner(mat, x[blk]);
    out(static_cast<Index>(i)) = s;
  }
  return out;
}

BlockMats apply_at(const StandardForm& f, const Vec& y) {
  BlockMats out;
  out.reserve(f.sizes.size());
  for (Index s : f.sizes) out.push_back(Mat::Zero(s, s));
  for (std::size_t i = 0; i < f.a.size(); ++i) {
    const Real yi = y(static_cast<Index>(i));
    if (yi == 0.0) continue;
    for (const auto& [blk, mat] : f.a[i]) out[blk] += yi * mat;
  }
  return out;
}

// Nesterov-Todd scaling of one block: W = G G^T with G^T Z G = G^{-1} X G^{-T} = diag(d).
struct NtScaling {
  Mat g;
  Mat g_inv;
  Mat w;
  Vec d;
};

// From chol(X) = Lx, chol(Z) = Lz and the SVD Lz^T Lx = U S V^T: G = Lx V S^{-1/2}, d = diag(S).
bool nt_scaling(const Mat& x, const Mat& z, NtScaling& out) {
  Eigen::LLT<Mat> llx(x), llz(z);
  if (llx.info() != Eigen::Success || llz.info() != Eigen::Success) return false;
  const Mat lx = llx.matrixL();
  const Mat lz = llz.matrixL();
  Eigen::JacobiSVD<Mat> svd(lz.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  if (!(sv.minCoeff() > 0.0)) return false;
  out.d = sv;
  const Vec d_inv_half = sv.cwiseSqrt().cwiseInverse();
  out.g = lx * svd.matrixV() * d_inv_half.asDiagonal();
  // G^{-1} = S^{-1/2} U^T Lz^T, using V^T = S^{-1} U^T Lz^T Lx.
  out.g_inv = d_inv_half.asDiagonal() * svd.matrixU().transpose() * lz.transpose();
  out.w = sym(out.g * out.g.transpose());
  return true;
}

// Largest alpha with x + alpha dx PSD (infinity if unbounded).
Real max_step(const Mat& x, const Mat& dx) {
  Eigen::LLT<Mat> llt(x);
  Mat s;
  if (llt.info() == Eigen::Success) {
    const Mat l = llt.matrixL();
    Mat tmp = l.triangularView<Eigen::Lower>().solve(dx);
    s = l.triangularView<Eigen::Lower>().solve(tmp.transpose());
  } else {
    return 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(s), Eigen::EigenvaluesOnly);
  const Real lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<Real>::infinity();
  return -1.0 / lmin;
}

Real max_step(const BlockMats& x, const BlockMats& dx) {
  Real a = std::numeric_limits<Real>::infinity();
  for (std::size_t b = 0; b < x.size(); ++b) a = std::min(a, max_step(x[b], dx[b]));
  return a;
}

struct Direction {
  BlockMats dx;
  Vec dy;
  BlockMats dz;
};

class InteriorPoint {
 public:
  // Final say on termination, given the iterate in internal scaling.
  using Acceptor = std::function<bool(const BlockMats& x, const Vec& y)>;

  InteriorPoint(const StandardForm& f, const SolverOptions& opts, Acceptor accept, bool cautious = false)
      : f_(f), opts_(opts), accept_(std::move(accept)), cautious_(cautious) {}

  struct Result {
    BlockMats x;
    Vec y;
    BlockMats z;
    SolveStatus status = SolveStatus::numerical_failure;
    int iterations = 0;
    std::string message;
  };

  Result run();

 private:
  void initialize();
  bool factor_schur();
  Direction direction(const BlockMats& rc_hat, const Vec& rp, const BlockMats& rd) const;

  const StandardForm& f_;
  SolverOptions opts_;
  Acceptor accept_;
  bool cautious_;  // shorter steps and a centering floor
  BlockMats x_, z_;
  Vec y_;
  std::vector<NtScaling> scal_;
  Eigen::LLT<Mat> schur_llt_;
  Eigen::LDLT<Mat> schur_ldlt_;
  bool use_ldlt_ = false;
};

void InteriorPoint::initialize() {
  const std::size_t nb = f_.sizes.size();
  x_.clear();
  z_.clear();
  for (std::size_t b = 0; b < nb; ++b) {
    const Real s = static_cast<Real>(f_.sizes[b]);
    Real ratio = 0.0;
    Real max_a = 0.0;
    for (std::size_t i : f_.touching[b]) {
      for (const auto& [blk, mat] : f_.a[i]) {
        if (blk != b) continue;
        const Real na = mat.norm();
        max_a = std::max(max_a, na);
        ratio = std::max(ratio, (1.0 + std::abs(f_.b(static_cast<Index>(i)))) / (1.0 + na));
      }
    }
    const Real xi = std::max<Real>({10.0L, std::sqrt(s), s * ratio});
    const Real eta = std::max<Real>({10.0L, std::sqrt(s), f_.c[b].norm(), max_a});
    x_.push_back(xi * Mat::Identity(f_.sizes[b], f_.sizes[b]));
    z_.push_back(eta * Mat::Identity(f_.sizes[b], f_.sizes[b]));
  }
  y_ = Vec::Zero(static_cast<Index>(f_.a.size()));
}

bool InteriorPoint::factor_schur() {
  const std::size_t m = f_.a.size();
  Mat schur = Mat::Zero(static_cast<Index>(m), static_cast<Index>(m));
  // Per block, W A_i W for every constraint touching it, then pairwise inner products.
  for (std::size_t b = 0; b < f_.sizes.size(); ++b) {
    const auto& list = f_.touching[b];
    if (list.empty()) continue;
    const Mat& w = scal_[b].w;
    std::vector<const Mat*> mats(list.size());
    std::vector<Mat> scaled(list.size());
    for (std::size_t q = 0; q < list.size(); ++q) {
      for (const auto& [blk, mat] : f_.a[list[q]]) {
        if (blk == b) mats[q] = &mat;
      }
      scaled[q] = w * (*mats[q]) * w;
    }
    for (std::size_t q = 0; q < list.size(); ++q) {
      for (std::size_t r = 0; r <= q; ++r) {
        const Real v = inner(*mats[r], scaled[q]);
        schur(static_cast<Index>(list[q]), static_cast<Index>(list[r])) += v;
      }
    }
  }
  schur = schur.selfadjointView<Eigen::Lower>();
  use_ldlt_ = false;
  schur_llt_.compute(schur);
  if (schur_llt_.info() == Eigen::Success) return true;
  const Real jitter = 1e-14 * std::max<Real>(1.0, schur.diagonal().cwiseAbs().maxCoeff());
  schur.diagonal().array() += jitter;
  schur_ldlt_.compute(schur);
  use_ldlt_ = true;
  return schur_ldlt_.info() == Eigen::Success;
}

Direction InteriorPoint::direction(const BlockMats& rc_hat, const Vec& rp, const BlockMats& rd) const {
  const std::size_t nb = f_.sizes.size();
  BlockMats tmp(nb);
  for (std::size_t b = 0; b < nb; ++b) tmp[b] = rc_hat[b] - scal_[b].w * rd[b] * scal_[b].w;
  Vec rhs = rp - apply_a(f_, tmp);
  auto schur_solve = [&](const Vec& v) {
    return use_ldlt_ ? Vec(schur_ldlt_.solve(v)) : Vec(schur_llt_.solve(v));
  };
  Direction d;
  d.dy = schur_solve(rhs);
  d.dz.resize(nb);
  d.dx.resize(nb);
  auto expand = [&] {
    BlockMats aty = apply_at(f_, d.dy);
    for (std::size_t b = 0; b < nb; ++b) {
      d.dz[b] = sym(rd[b] - aty[b]);
      d.dx[b] = sym(rc_hat[b] - scal_[b].w * d.dz[b] * scal_[b].w);
    }
  };
  expand();
  // Refinement against A(dX) = rp, which the condensed system only meets up to rounding.
  Real res_norm = (rp - apply_a(f_, d.dx)).norm();
  for (int pass = 0; pass < 3 && res_norm > 0.0; ++pass) {
    const Vec dy_old = d.dy;
    d.dy += schur_solve(rp - apply_a(f_, d.dx));
    expand();
    const Real next = (rp - apply_a(f_, d.dx)).norm();
    if (!(next < 0.5 * res_norm)) {
      if (!(next < res_norm)) {
        d.dy = dy_old;
        expand();
      }
      break;
    }
    res_norm = next;
  }
  return d;
}

InteriorPoint::Result InteriorPoint::run() {
  initialize();
  const std::size_t nb = f_.sizes.size();
  Real total_dim = 0.0;
  for (Index s : f_.sizes) total_dim += static_cast<Real>(s);
  const Real norm_b = f_.b.norm();
  const Real norm_c = frob(f_.c);

  Result best;
  Real best_merit = std::numeric_limits<Real>::infinity();
  auto record = [&](Real merit, int iter) {
    if (merit < best_merit) {
      best_merit = merit;
      best.x = x_;
      best.y = y_;
      best.z = z_;
      best.iterations = iter;
    }
  };

  bool tolerances_met = false;
  Real last_pobj = 0.0, last_dobj = 0.0;
  auto fail = [&](const char* why) {
    best.message = why;
    if (tolerances_met) best.message += "; recomputed residuals stayed above tolerance";
    // Both objectives far beyond the data scale: the breakdown is divergence.
    if (best.status == SolveStatus::numerical_failure && last_dobj > 1e5 * (1.0 + norm_c) &&
        last_pobj > 1e4 * (1.0 + norm_c)) {
      best.x = x_;
      best.y = y_;
      best.z = z_;
      best.status = SolveStatus::unbounded;
      best.message += "; objective grows without bound";
    }
    return best;
  };

  int stalls = 0;
  scal_.resize(nb);
  for (int iter = 0; iter <= opts_.max_iters; ++iter) {
    const Vec ax = apply_a(f_, x_);
    const Vec rp = f_.b - ax;
    BlockMats aty = apply_at(f_, y_);
    BlockMats rd(nb);
    for (std::size_t b = 0; b < nb; ++b) rd[b] = f_.c[b] - z_[b] - aty[b];
    const Real pobj = inner(f_.c, x_);
    const Real dobj = f_.b.dot(y_);
    last_pobj = pobj;
    last_dobj = dobj;
    // Infeasibility can hide <X, Z> inside pobj - dobj, so both are required small.
    const Real relgap =
        std::max(std::abs(pobj - dobj), inner(x_, z_)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const Real pinf = rp.norm() / (1.0 + norm_b);
    const Real dinf = frob(rd) / (1.0 + norm_c);
    record(std::max({relgap, pinf, dinf}), iter);
    if (opts_.verbose) {
      std::fprintf(stderr, "%3d pobj %+.10Le dobj %+.10Le gap %.2Le pinf %.2Le dinf %.2Le\n", iter, pobj, dobj, relgap, pinf,
                   dinf);
    }

    if (relgap <= opts_.gap_tol && pinf <= opts_.feas_tol && dinf <= opts_.feas_tol ) {
      if (accept_ && !accept_(x_, y_)) {
        tolerances_met = true;
      } else {
        best.x = x_;
        best.y = y_;
        best.z = z_;
        best.iterations = iter;
        best.status = SolveStatus::optimal;
        return best;
      }
    }
    // Certificates of infeasibility along diverging iterates.
    if (dobj > 0.0) {
      BlockMats cert = aty;
      for (std::size_t b = 0; b < nb; ++b) cert[b] += z_[b];
      if (frob(cert) / dobj < 1e-8 && dobj > 1e6 * (1.0 + norm_c)) {
        best.x = x_;
        best.y = y_;
        best.z = z_;
        best.iterations = iter;
        best.status = SolveStatus::unbounded;
        return fail("dual multipliers infeasible: objective grows without bound");
      }
    }
    if (pobj < 0.0 && ax.norm() / -pobj < 1e-8 && -pobj > 1e6 * (1.0 + norm_b)) {
      best.x = x_;
      best.y = y_;
      best.z = z_;
      best.iterations = iter;
      best.status = SolveStatus::infeasible;
      return fail("linear matrix inequalities admit no feasible point");
    }
    // Weak infeasibility: complementarity has collapsed but the objectives stay
    // apart, with no ray to certify it. Classified by the side that blew up.
    if (iter >= 20 && inner(x_, z_) / (1.0 + std::abs(pobj) + std::abs(dobj)) < 1e-3 * opts_.gap_tol &&
        relgap > 100.0 * opts_.gap_tol) {
      best.x = x_;
      best.y = y_;
      best.z = z_;
      best.iterations = iter;
      if (dobj > 1e6 * (1.0 + norm_c)) {
        best.status = SolveStatus::unbounded;
        return fail("duality gap stalled at a diverging objective: objective grows without bound");
      }
      if (-pobj > 1e6 * (1.0 + norm_b)) {
        best.status = SolveStatus::infeasible;
        return fail("duality gap stalled at a diverging objective: no feasible point");
      }
    }
    if (iter == opts_.max_iters) break;

    for (std::size_t b = 0; b < nb; ++b) {
      if (!nt_scaling(x_[b], z_[b], scal_[b])) {
        if (opts_.verbose) {
          Eigen::SelfAdjointEigenSolver<Mat> ex(x_[b], Eigen::EigenvaluesOnly), ez(z_[b], Eigen::EigenvaluesOnly);
          std::fprintf(stderr, "    block %zu lost definiteness: x eig [%.3Le, %.3Le] z eig [%.3Le, %.3Le]\n", b,
                       ex.eigenvalues().minCoeff(), ex.eigenvalues().maxCoeff(), ez.eigenvalues().minCoeff(),
                       ez.eigenvalues().maxCoeff());
        }
        return fail("iterate left the cone interior");
      }
    }
    if (!factor_schur()) {
      return fail("Schur complement factorization failed");
    }
    const Real mu = inner(x_, z_) / total_dim;
    if (opts_.verbose) {
      Real lo = 1e300L, hi = 0.0L;
      for (const auto& s : scal_) {
        lo = std::min(lo, s.d.cwiseProduct(s.d).minCoeff());
        hi = std::max(hi, s.d.cwiseProduct(s.d).maxCoeff());
      }
      std::fprintf(stderr, "    centrality min %.2Le max %.2Le\n", lo / mu, hi / mu);
    }

    // Predictor (affine scaling).
    BlockMats rc(nb);
    for (std::size_t b = 0; b < nb; ++b) rc[b] = -x_[b];
    Direction pred = direction(rc, rp, rd);
    const Real ap = std::min<Real>(1.0, max_step(x_, pred.dx));
    const Real ad = std::min<Real>(1.0, max_step(z_, pred.dz));
    Real mu_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) mu_aff += inner(x_[b] + ap * pred.dx[b], z_[b] + ad * pred.dz[b]);
    mu_aff /= total_dim;
    const Real expon = std::max<Real>(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const Real sigma = std::clamp<Real>(std::pow(std::max<Real>(mu_aff, 0.0) / mu, expon), cautious_ ? 0.1 : 0.0, 1.0);

    // Corrector in NT-scaled coordinates: V (dX~ + dZ~) + (dX~ + dZ~) V = rhs.
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& s = scal_[b];
      const Mat dxs = s.g_inv * pred.dx[b] * s.g_inv.transpose();
      const Mat dzs = s.g.transpose() * pred.dz[b] * s.g;
      Mat r = -(dxs * dzs + dzs * dxs);
      r.diagonal().array() += 2.0 * sigma * mu;
      r.diagonal() -= 2.0 * s.d.cwiseProduct(s.d);
      for (Index i = 0; i < r.rows(); ++i) {
        for (Index j = 0; j < r.cols(); ++j) r(i, j) /= (s.d(i) + s.d(j));
      }
      rc[b] = sym(s.g * r * s.g.transpose());
    }
    Direction dir = direction(rc, rp, rd);
    const Real tau = cautious_ ? 0.8 : 0.9 + 0.09 * std::min(ap, ad);
    if (opts_.verbose) std::fprintf(stderr, "    sigma %.2Le ap %.3Lf ad %.3Lf mu %.2Le\n", sigma, ap, ad, mu);
    const Real alpha_p = std::min<Real>(1.0, tau * max_step(x_, dir.dx));
    const Real alpha_d = std::min<Real>(1.0, tau * max_step(z_, dir.dz));
    if (!(alpha_p > 0.0) || !(alpha_d > 0.0) || !std::isfinite(alpha_p + alpha_d)) {
      return fail("zero step length");
    }
    if (alpha_p < 1e-8 && alpha_d < 1e-8) {
      if (++stalls >= 5) {
        return fail("step lengths stalled");
      }
    } else {
      stalls = 0;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      x_[b] = sym(x_[b] + alpha_p * dir.dx[b]);
      z_[b] = sym(z_[b] + alpha_d * dir.dz[b]);
    }
    y_ += alpha_d * dir.dy;
  }
  return fail("iteration limit reached");
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts) {
  problem.validate();
  if (problem.num_variables() == 0) throw std::invalid_argument("conic problem has no variables");
  if (problem.blocks().empty() && problem.num_nonneg() == 0) throw std::invalid_argument("conic problem has no blocks");
  for (const auto& b : problem.blocks()) {
    if (b.size() > 64) throw std::invalid_argument("block '" + b.name + "' larger than 64");
  }
  const double sense_sign = problem.objective().sense == Sense::maximize ? 1.0 : -1.0;
  StandardForm f = to_standard(problem, sense_sign);

  // Row equilibration, then scaling of C and b by their largest entries.
  const std::size_t m = f.a.size();
  Vec row_scale = Vec::Ones(static_cast<Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    Real s = 0.0;
    for (const auto& [blk, mat] : f.a[i]) s += mat.squaredNorm();
    s = std::sqrt(s);
    if (s == 0.0) {
      // Free variable absent from every block.
      if (f.b(static_cast<Index>(i)) != 0.0) {
        ConicSolution sol;
        sol.status = SolveStatus::unbounded;
        sol.message = "variable '" + problem.variables()[i].name + "' is unconstrained";
        sol.objective_value = sense_sign * std::numeric_limits<double>::infinity();
        return sol;
      }
      continue;
    }
    row_scale(static_cast<Index>(i)) = s;
    for (auto& [blk, mat] : f.a[i]) mat /= s;
    f.b(static_cast<Index>(i)) /= s;
  }
  Real c_scale = 1.0;
  for (const auto& c : f.c) c_scale = std::max(c_scale, c.cwiseAbs().maxCoeff());
  const Real b_scale = std::max<Real>(1.0, f.b.cwiseAbs().maxCoeff());
  for (auto& c : f.c) c /= c_scale;
  f.b /= b_scale;

  // Back to the caller's scaling; status and message are filled in separately.
  auto assemble = [&](const BlockMats& x, const Vec& y) {
    ConicSolution sol;
    sol.variable_values.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      sol.variable_values[i] = static_cast<double>(y(static_cast<Index>(i)) * c_scale / row_scale(static_cast<Index>(i)));
    }
    double x_trace_obj = 0.0;
    for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
      const auto& blk = problem.blocks()[b];
      Eigen::MatrixXd xb = Eigen::MatrixXd::Zero(blk.size(), blk.size());
      if (const std::size_t sb = f.lmi_std[b]; sb != kNone) {
        const Mat& q = f.lmi_basis[b];
        const Mat xs = x[sb] * b_scale;
        xb = (q.size() == 0 ? xs : Mat(q * xs * q.transpose())).cast<double>();
      }
      x_trace_obj += blk.constant.cwiseProduct(xb).sum();
      sol.dual_matrices.push_back(std::move(xb));
    }
    sol.sign_multipliers.assign(m, 0.0);
    for (std::size_t v = 0; v < m; ++v) {
      if (f.sign_block_of[v] != kNone) sol.sign_multipliers[v] = static_cast<double>(x[f.sign_block_of[v]](0, 0) * b_scale);
    }
    sol.objective_value = problem.objective_value(sol.variable_values);
    sol.dual_objective = sense_sign * x_trace_obj + problem.objective().offset;
    const double nu = std::max({1.0, std::abs(sol.objective_value), std::abs(sol.dual_objective)});
    sol.duality_gap = sense_sign * (sol.dual_objective - sol.objective_value) / nu;
    sol.max_residual = check_certificate(problem, sol, std::numeric_limits<double>::infinity()).max_residual;
    return sol;
  };
  auto accept = [&](const BlockMats& x, const Vec& y) {
    const ConicSolution trial = assemble(x, y);
    return std::abs(trial.duality_gap) <= opts.gap_tol && trial.max_residual <= opts.feas_tol;
  };

  InteriorPoint ipm(f, opts, accept);
  auto res = ipm.run();
  if (res.status == SolveStatus::numerical_failure) {
    InteriorPoint retry(f, opts, accept, true);
    auto again = retry.run();
    if (again.status != SolveStatus::numerical_failure) {
      again.iterations += res.iterations;
      res = std::move(again);
    }
  }
  if (res.x.empty()) {
    ConicSolution sol;
    sol.message = res.message.empty() ? "no iterate produced" : res.message;
    return sol;
  }
  ConicSolution sol = assemble(res.x, res.y);
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.message = res.message;
  if (sol.status == SolveStatus::numerical_failure && std::abs(sol.duality_gap) <= 10.0 * opts.gap_tol &&
      sol.max_residual <= 10.0 * opts.feas_tol) {
    sol.status = SolveStatus::optimal;
    sol.message = "reduced accuracy: within 10x the requested tolerances (" + res.message + ")";
  }
  if (sol.status == SolveStatus::unbounded) {
    sol.objective_value = sense_sign * std::numeric_limits<double>::infinity();
  }
  return sol;
}

ResidualReport check_certificate(const ConicProblem& problem, const ConicSolution& s, double tol) {
  ResidualReport r;
  const auto& x = s.variable_values;
  const std::size_t m = problem.num_variables();
  if (x.size() != m || s.dual_matrices.size() != problem.blocks().size() || s.sign_multipliers.size() != m) {
    r.violations.push_back("solution shape does not match problem");
    r.max_residual = std::numeric_limits<double>::infinity();
    return r;
  }
  const double sense_sign = problem.objective().sense == Sense::maximize ? 1.0 : -1.0;
  const double obj = problem.objective_value(x);
  double dual_obj = problem.objective().offset;
  for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
    dual_obj += sense_sign * inner_d(problem.blocks()[b].constant, s.dual_matrices[b]);
  }
  const double scale = std::max({1.0, std::abs(obj), std::abs(dual_obj)});

  auto neg_part_min_eig = [](const MatrixXd& mat) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym_d(mat), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double norm = std::max(1.0, mat.cwiseAbs().maxCoeff());
    return std::max(0.0, -lmin) / norm;
  };

  for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
    const MatrixXd zb = problem.slack(b, x);
    const MatrixXd& xb = s.dual_matrices[b];
    r.slack_infeasibility = std::max(r.slack_infeasibility, neg_part_min_eig(zb));
    r.multiplier_infeasibility = std::max(r.multiplier_infeasibility, neg_part_min_eig(xb));
    r.complementarity = std::max(r.complementarity, std::abs((xb * zb + zb * xb).trace()) / scale);
  }
  double c_norm = 1.0;
  for (double c : problem.objective().coeffs) c_norm = std::max(c_norm, std::abs(c));
  for (std::size_t v = 0; v < m; ++v) {
    double lhs = sense_sign * problem.objective().coeffs[v] + s.sign_multipliers[v];
    for (std::size_t b = 0; b < problem.blocks().size(); ++b) {
      if (const auto* a = problem.blocks()[b].coeff_of(v)) lhs += inner_d(*a, s.dual_matrices[b]);
    }
    r.dual_equality = std::max(r.dual_equality, std::abs(lhs) / c_norm);
    if (problem.variables()[v].sign == VarSign::nonneg) {
      r.sign_infeasibility =
          std::max({r.sign_infeasibility, std::max(0.0, -x[v]) / scale, std::max(0.0, -s.sign_multipliers[v]) / c_norm});
      r.complementarity = std::max(r.complementarity, 2.0 * std::abs(x[v] * s.sign_multipliers[v]) / scale);
    } else if (s.sign_multipliers[v] != 0.0) {
      r.dual_equality = std::max(r.dual_equality, std::abs(s.sign_multipliers[v]) / c_norm);
    }
  }
  r.gap = std::abs(dual_obj - obj) / scale;
  r.max_residual = std::max({r.slack_infeasibility, r.multiplier_infeasibility, r.sign_infeasibility, r.dual_equality,
                             r.complementarity, r.gap});
  auto flag = [&](const char* what, double value) {
    if (!(value <= tol)) {
      std::ostringstream os;
      os << what << " " << value << " exceeds " << tol;
      r.violations.push_back(os.str());
    }
  };
  flag("slack infeasibility", r.slack_infeasibility);
  flag("multiplier infeasibility", r.multiplier_infeasibility);
  flag("sign infeasibility", r.sign_infeasibility);
  flag("dual equality residual", r.dual_equality);
  flag("complementarity residual", r.complementarity);
  flag("duality gap", r.gap);
  r.ok = r.violations.empty();
  return r;
}

}  // namespace twodist
