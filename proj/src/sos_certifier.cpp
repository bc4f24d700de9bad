#include "twodist/sos_certifier.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "twodist/gegenbauer.hpp"
#include "twodist/parallel.hpp"
#include "twodist/sdp_bounds.hpp"

namespace twodist {

namespace {

UniPolyMatrix scaled(const UniPolyMatrix& m, const Rational& s) {
  UniPolyMatrix out = m;
  for (auto& row : out) {
    for (auto& e : row) e *= s;
  }
  return out;
}

UniPolyMatrix constant_matrix(const std::vector<std::vector<Rational>>& m) {
  UniPolyMatrix out;
  for (const auto& row : m) {
    out.emplace_back();
    for (const auto& e : row) out.back().emplace_back(e);
  }
  return out;
}

UniPolyMatrix zero_matrix(int size) {
  return UniPolyMatrix(static_cast<std::size_t>(size), std::vector<UniPoly>(static_cast<std::size_t>(size)));
}

int matrix_degree(const UniPolyMatrix& m) {
  int d = 0;
  for (const auto& row : m) {
    for (const auto& e : row) d = std::max(d, e.degree());
  }
  return d;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

// inf and nan have no JSON spelling; keep them as strings.
nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

nlohmann::json segment_json(const SegmentCertificate& c) {
  nlohmann::json F = nlohmann::json::array(), Q = nlohmann::json::array();
  for (const auto& f : c.dual.F) F.push_back(matrix_json(f));
  for (const auto& q : c.Q) Q.push_back(matrix_json(q));
  nlohmann::json pw = nlohmann::json::array();
  for (double v : c.pointwise_min) pw.push_back(number_json(v));
  return {
      {"n", c.n},
      {"k", c.k},
      {"p", c.p},
      {"segment", {c.a1.get_d(), c.a2.get_d()}},
      {"segment_exact", {to_string(c.a1), to_string(c.a2)}},
      {"bound", number_json(c.bound)},
      {"status", to_string(c.status)},
      {"ok", c.ok()},
      {"message", c.message},
      {"alpha", c.dual.alpha},
      {"beta", {{"b11", c.dual.beta(0, 0)}, {"b12", c.dual.beta(0, 1)}, {"b22", c.dual.beta(1, 1)}}},
      {"F", F},
      {"Q", Q},
      {"residuals", c.residuals},
      {"pointwise_min", pw},
      {"min_eigenvalue", c.min_eigenvalue},
      {"iterations", c.iterations},
  };
}

}  // namespace

double DualPolynomial::eval(double a, const std::vector<Eigen::MatrixXd>& dual_blocks) const {
  double v = constant.eval(a);
  for (std::size_t b = 0; b < coeff.size(); ++b) {
    const auto& m = coeff[b];
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t s = 0; s < m.size(); ++s) {
        if (!m[r][s].is_zero()) v += m[r][s].eval(a) * dual_blocks[b](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
      }
    }
  }
  return v;
}

std::vector<int> dual_block_sizes(int p) {
  std::vector<int> sizes{2};
  for (int i = 0; i <= p; ++i) sizes.push_back(p - i + 1);
  for (int i = 1; i <= p; ++i) sizes.push_back(1);
  return sizes;
}

std::vector<DualPolynomial> build_dual_polynomials(int n, int k, int p) {
  if (p < 1) throw std::invalid_argument("truncation order p must be >= 1");
  const AffineForm A = AffineForm::identity();
  const AffineForm B = bk_of_a(k);
  const AffineForm one = AffineForm::constant(1);
  GegenbauerTable g(n, p);
  auto zonal = zonal_set(n, p);

  struct Spec {
    const char* name;
    std::array<AffineForm, 3> args;
    bool pair;  // x_1 or x_2: carries the -1, the alpha terms and the factor 3
    AffineForm inner;
  };
  const std::array<Spec, 6> specs{{
      {"x1(a,a,1)", {A, A, one}, true, A},
      {"x2(b,b,1)", {B, B, one}, true, B},
      {"x3(a,a,a)", {A, A, A}, false, A},
      {"x4(a,a,b)", {A, A, B}, false, A},
      {"x5(a,b,b)", {A, B, B}, false, A},
      {"x6(b,b,b)", {B, B, B}, false, A},
  }};

  std::vector<DualPolynomial> out;
  for (const auto& sp : specs) {
    DualPolynomial f;
    f.name = sp.name;
    if (sp.pair) {
      f.constant = UniPoly(Rational(-1));
      f.coeff.push_back(constant_matrix({{0, -1}, {-1, -1}}));
    } else {
      f.coeff.push_back(constant_matrix({{0, 0}, {0, -1}}));
    }
    const Rational weight = sp.pair ? -3 : -1;
    for (int i = 0; i <= p; ++i) f.coeff.push_back(scaled(zonal->substitute(i, sp.args), weight));
    for (int i = 1; i <= p; ++i) {
      UniPolyMatrix m = zero_matrix(1);
      if (sp.pair) m[0][0] = -g.poly(i).compose(sp.inner.as_poly());
      f.coeff.push_back(m);
    }
    f.degree = std::max(0, f.constant.degree());
    for (const auto& m : f.coeff) f.degree = std::max(f.degree, matrix_degree(m));
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Eigen::MatrixXd> DualVariables::blocks() const {
  std::vector<Eigen::MatrixXd> out{beta};
  for (const auto& f : F) out.push_back(f);
  for (double v : alpha) out.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return out;
}

double DualVariables::objective(const Eigen::MatrixXd& s0_at_ones) const {
  double v = 1.0 + beta(0, 0);
  for (double x : alpha) v += x;
  if (!F.empty()) v += (F[0].array() * s0_at_ones.array()).sum();
  return v;
}

SegmentCertifier::SegmentCertifier(int n, int k, int p)
    : n_(n), k_(k), p_(p), families_(build_dual_polynomials(n, k, p)), s0_ones_(zonal_set(n, p)->eval(0, 1.0, 1.0, 1.0)) {}

std::vector<SegmentCertifier::Row> SegmentCertifier::rows(const Rational& a1, const Rational& a2) const {
  std::vector<Row> out;
  for (std::size_t fi = 0; fi < families_.size(); ++fi) {
    const auto& f = families_[fi];
    const int m = f.degree;
    const auto T = fplus_matrix(m, a1, a2);
    auto apply = [&](const UniPoly& poly, int d) {
      Rational acc = 0;
      for (int e = 0; e <= poly.degree(); ++e) acc += T[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)] * poly.coeff(static_cast<std::size_t>(e));
      return acc;
    };
    for (int d = 0; d <= 2 * m; ++d) {
      Row row{fi, d, apply(f.constant, d).get_d(), {}};
      for (std::size_t b = 0; b < f.coeff.size(); ++b) {
        const auto& mat = f.coeff[b];
        for (std::size_t r = 0; r < mat.size(); ++r) {
          for (std::size_t s = 0; s < mat.size(); ++s) {
            if (mat[r][s].is_zero()) continue;
            const Rational v = apply(mat[r][s], d);
            if (v != 0) row.terms.push_back({b, static_cast<int>(r), static_cast<int>(s), v.get_d()});
          }
        }
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

ConicProblem SegmentCertifier::problem_from_rows(const std::vector<Row>& rows) const {
  const auto sizes = dual_block_sizes(p_);
  ConicProblem prob;
  std::vector<std::size_t> blocks;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(sizes[b], sizes[b]);
    std::string name;
    if (b == 0) {
      c(0, 0) = 1.0;
      name = "beta";
    } else if (b == 1) {
      c = s0_ones_;
      name = "F0";
    } else if (b <= static_cast<std::size_t>(p_) + 1) {
      name = "F" + std::to_string(b - 1);
    } else {
      c(0, 0) = 1.0;
      name = "alpha" + std::to_string(b - static_cast<std::size_t>(p_) - 1);
    }
    blocks.push_back(prob.add_block(name, c));
  }
  for (std::size_t fi = 0; fi < families_.size(); ++fi) {
    const int sz = families_[fi].degree + 1;
    blocks.push_back(prob.add_block("Q" + std::to_string(fi + 1), Eigen::MatrixXd::Zero(sz, sz)));
  }

  std::vector<double> obj;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const auto& row = rows[ri];
    auto y = prob.add_variable("row" + std::to_string(ri), VarSign::free);
    obj.push_back(row.rhs);
    std::vector<Eigen::MatrixXd> coeff;
    for (auto s : sizes) coeff.push_back(Eigen::MatrixXd::Zero(s, s));
    for (const auto& t : row.terms) coeff[t.block](t.r, t.s) += t.value;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      if (!coeff[b].isZero(0.0)) prob.add_term(blocks[b], y, coeff[b]);
    }
    const int sz = families_[row.family].degree + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(sz, sz);
    for (int i = 0; i < sz; ++i) {
      const int j = row.degree - i;
      if (j >= 0 && j < sz) h(i, j) = -1.0;
    }
    prob.add_term(blocks[sizes.size() + row.family], y, h);
  }
  prob.set_objective(Sense::maximize, obj, 1.0);
  return prob;
}

ConicProblem SegmentCertifier::build_problem(const Rational& a1, const Rational& a2) const {
  return problem_from_rows(rows(a1, a2));
}

SegmentCertificate SegmentCertifier::certify(const Rational& a1, const Rational& a2, const CertifyOptions& opts) const {
  if (!(a1 >= 0 && a1 < a2 && a2 <= Rational(1, 2 * k_ - 1))) {
    throw std::invalid_argument("segment [" + to_string(a1) + ", " + to_string(a2) + "] not inside I_" + std::to_string(k_));
  }
  SegmentCertificate cert;
  cert.n = n_;
  cert.k = k_;
  cert.p = p_;
  cert.a1 = a1;
  cert.a2 = a2;
  cert.bound = std::numeric_limits<double>::infinity();

  const auto rs = rows(a1, a2);
  const ConicProblem prob = problem_from_rows(rs);
  const ConicSolution sol = solve(prob, opts.solver);
  cert.iterations = sol.iterations;
  cert.status = sol.status;
  if (sol.status == SolveStatus::unbounded) {
    // The row multipliers run off to infinity: no PSD dual point exists.
    cert.status = SolveStatus::infeasible;
    cert.message = "infeasible relaxation; shrink the segment or raise the degree";
    return cert;
  }
  if (sol.status != SolveStatus::optimal) {
    cert.message = sol.message;
    return cert;
  }

  const auto sizes = dual_block_sizes(p_);
  const std::size_t nd = sizes.size();
  std::vector<Eigen::MatrixXd> X(sol.dual_matrices.begin(), sol.dual_matrices.begin() + static_cast<long>(nd));
  cert.dual.beta = X[0];
  for (int i = 0; i <= p_; ++i) cert.dual.F.push_back(X[static_cast<std::size_t>(i) + 1]);
  for (int i = 1; i <= p_; ++i) cert.dual.alpha.push_back(X[static_cast<std::size_t>(p_ + 1 + i)](0, 0));
  cert.Q.assign(sol.dual_matrices.begin() + static_cast<long>(nd), sol.dual_matrices.end());
  cert.bound = sol.dual_objective;

  cert.residuals.assign(families_.size(), 0.0);
  for (const auto& row : rs) {
    const auto& q = cert.Q[row.family];
    double lhs = 0.0, rhs = row.rhs, scale = 1.0 + std::abs(row.rhs);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const Eigen::Index j = row.degree - i;
      if (j >= 0 && j < q.cols()) lhs += q(i, j);
    }
    for (const auto& t : row.terms) {
      const double v = t.value * X[t.block](t.r, t.s);
      rhs += v;
      scale += std::abs(v);
    }
    scale = std::max(scale, std::abs(lhs));
    cert.residuals[row.family] = std::max(cert.residuals[row.family], std::abs(lhs - rhs) / scale);
  }

  const double lo = a1.get_d(), hi = a2.get_d();
  for (const auto& f : families_) {
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < opts.grid_points; ++j) {
      const double a = j == opts.grid_points - 1 ? hi : lo + (hi - lo) * j / (opts.grid_points - 1);
      mn = std::min(mn, f.eval(a, X));
    }
    cert.pointwise_min.push_back(mn);
  }

  double mag = 1.0;
  cert.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& m : sol.dual_matrices) {
    if (m.size() == 0) continue;
    mag = std::max(mag, m.cwiseAbs().maxCoeff());
    cert.min_eigenvalue = std::min(cert.min_eigenvalue, min_eigenvalue(m));
  }

  std::string why;
  for (std::size_t f = 0; f < families_.size(); ++f) {
    if (cert.residuals[f] > opts.residual_tol) why += "; coefficient residual " + families_[f].name;
    if (cert.pointwise_min[f] < -opts.pointwise_tol) why += "; negative on grid " + families_[f].name;
  }
  if (cert.min_eigenvalue < -opts.residual_tol * mag) why += "; multiplier not PSD";
  cert.checks_passed = why.empty();
  cert.message = why.empty() ? "certified" : why.substr(2);
  return cert;
}

SegmentCertificate certify_segment(int n, int k, int p, const Rational& a1, const Rational& a2, const CertifyOptions& opts) {
  return SegmentCertifier(n, k, p).certify(a1, a2, opts);
}

IntervalCertificate certify_interval(int n, int k, int p, int num_segments, const CertifyOptions& opts, int jobs) {
  if (num_segments < 1) throw std::invalid_argument("need at least one segment");
  const SegmentCertifier certifier(n, k, p);
  const Rational step(1, num_segments * (2 * k - 1));
  IntervalCertificate out;
  out.per_segment.resize(static_cast<std::size_t>(num_segments));
  parallel_for(out.per_segment.size(), jobs, [&](std::size_t j) {
    out.per_segment[j] = certifier.certify(step * static_cast<long>(j), step * static_cast<long>(j + 1), opts);
  });
  out.all_ok = true;
  out.bound = -std::numeric_limits<double>::infinity();
  for (const auto& c : out.per_segment) {
    out.all_ok = out.all_ok && c.ok();
    out.bound = std::max(out.bound, c.ok() ? c.bound : std::numeric_limits<double>::infinity());
  }
  return out;
}

std::string certificate_json(const SegmentCertificate& cert) { return segment_json(cert).dump(2); }

void write_certificate_json(std::ostream& out, const IntervalCertificate& cert) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& c : cert.per_segment) segs.push_back(segment_json(c));
  nlohmann::json j{{"bound", number_json(cert.bound)}, {"all_ok", cert.all_ok}, {"segments", segs}};
  out << j.dump(2) << '\n';
}

}  // namespace twodist
