#include "twodist/sdp_bounds.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "twodist/format.hpp"
#include "twodist/gegenbauer.hpp"
#include "twodist/parallel.hpp"
#include "twodist/zonal.hpp"

namespace twodist {

TwoDistanceInstance TwoDistanceInstance::on_lrs_line(int n, int k, double a, int p) {
  if (k < 2) throw std::invalid_argument("LRS index k must be >= 2");
  TwoDistanceInstance inst;
  inst.n = n;
  inst.a = a;
  inst.b = (k * a - 1.0) / (k - 1.0);
  inst.k = k;
  inst.p = p;
  return inst;
}

void TwoDistanceInstance::validate() const {
  if (n < 3) throw std::invalid_argument("two-distance instance requires n >= 3");
  if (p < 1) throw std::invalid_argument("truncation order p must be >= 1");
  if (!(b >= -1.0 - 1e-15 && b < a && a < 1.0)) {
    throw std::invalid_argument("two-distance instance requires -1 <= b < a < 1: " + describe());
  }
  if (k && *k < 2) throw std::invalid_argument("LRS index k must be >= 2");
}

std::string TwoDistanceInstance::describe() const {
  std::ostringstream os;
  os << "n=" << n << " a=" << fmt17(a) << " b=" << fmt17(b);
  if (k) os << " k=" << *k;
  os << " p=" << p;
  return os.str();
}

double interval_end(int k) {
  if (k < 2) throw std::invalid_argument("LRS index k must be >= 2");
  return 1.0 / (2.0 * k - 1.0);
}

// ------------------------------------------------------------------ LP

double lp_bound(const TwoDistanceInstance& inst) {
  inst.validate();
  GegenbauerTable g(inst.n, inst.p);
  // Half-planes p*x + q*y >= r in (alpha_1, alpha_2).
  struct HalfPlane {
    double p, q, r;
  };
  std::vector<HalfPlane> hp{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  for (int i = 1; i <= inst.p; ++i) hp.push_back({g.eval(i, inst.a), g.eval(i, inst.b), -1.0});

  auto feasible = [&](double x, double y) {
    for (const auto& h : hp) {
      const double slack = h.p * x + h.q * y - h.r;
      if (slack < -1e-9 * (1.0 + std::abs(h.p * x) + std::abs(h.q * y))) return false;
    }
    return true;
  };
  // Recession directions of a planar polyhedron lie on constraint boundaries.
  std::vector<std::array<double, 2>> rays{{1.0, 0.0}, {0.0, 1.0}};
  for (const auto& h : hp) {
    rays.push_back({h.q, -h.p});
    rays.push_back({-h.q, h.p});
  }
  for (const auto& d : rays) {
    if (d[0] < 0.0 || d[1] < 0.0 || d[0] + d[1] <= 0.0) continue;
    bool recedes = true;
    for (const auto& h : hp) {
      if (h.p * d[0] + h.q * d[1] < -1e-12 * (std::abs(h.p) + std::abs(h.q))) {
        recedes = false;
        break;
      }
    }
    if (recedes) return std::numeric_limits<double>::infinity();
  }
  double best = 1.0;  // alpha = 0 is always feasible
  for (std::size_t i = 0; i < hp.size(); ++i) {
    for (std::size_t j = i + 1; j < hp.size(); ++j) {
      const double det = hp[i].p * hp[j].q - hp[i].q * hp[j].p;
      if (std::abs(det) < 1e-300) continue;
      const double x = (hp[i].r * hp[j].q - hp[i].q * hp[j].r) / det;
      const double y = (hp[i].p * hp[j].r - hp[i].r * hp[j].p) / det;
      if (feasible(x, y)) best = std::max(best, 1.0 + x + y);
    }
  }
  return best;
}

ConicProblem build_lp_conic(const TwoDistanceInstance& inst) {
  inst.validate();
  GegenbauerTable g(inst.n, inst.p);
  ConicProblem prob;
  auto a1 = prob.add_variable("alpha1", VarSign::nonneg);
  auto a2 = prob.add_variable("alpha2", VarSign::nonneg);
  for (int i = 1; i <= inst.p; ++i) {
    prob.add_scalar_inequality("lp" + std::to_string(i), 1.0, {{a1, g.eval(i, inst.a)}, {a2, g.eval(i, inst.b)}});
  }
  prob.set_objective(Sense::maximize, {1.0, 1.0}, 1.0);
  return prob;
}

// ------------------------------------------------------------------ SDP

ConicProblem build_primal_sdp(const TwoDistanceInstance& inst) {
  inst.validate();
  const int n = inst.n, p = inst.p;
  const double a = inst.a, b = inst.b;
  GegenbauerTable g(n, p);
  auto zonal = zonal_set(n, p);

  ConicProblem prob;
  std::array<std::size_t, 6> x{};
  for (int j = 0; j < 6; ++j) x[static_cast<std::size_t>(j)] = prob.add_variable("x" + std::to_string(j + 1), VarSign::nonneg);

  // Pair-count matrix: [[1, 0], [0, 0]] + (x1 + x2)/3 [[0, 1], [1, 1]] + (x3 + ... + x6) [[0, 0], [0, 1]].
  Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(2, 2);
  c0(0, 0) = 1.0;
  Eigen::MatrixXd pair(2, 2);
  pair << 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  Eigen::MatrixXd triple = Eigen::MatrixXd::Zero(2, 2);
  triple(1, 1) = 1.0;
  auto blk = prob.add_block("pairs", c0);
  prob.add_term(blk, x[0], pair);
  prob.add_term(blk, x[1], pair);
  for (int j = 2; j < 6; ++j) prob.add_term(blk, x[static_cast<std::size_t>(j)], triple);

  for (int i = 1; i <= p; ++i) {
    prob.add_scalar_inequality("gegenbauer" + std::to_string(i), 3.0,
                               {{x[0], g.eval(i, a)}, {x[1], g.eval(i, b)}});
  }

  const std::array<std::array<double, 3>, 7> args{{{1, 1, 1}, {a, a, 1}, {b, b, 1}, {a, a, a}, {a, a, b}, {a, b, b}, {b, b, b}}};
  for (int i = 0; i <= p; ++i) {
    auto eval = [&](const std::array<double, 3>& q) { return zonal->eval(i, q[0], q[1], q[2]); };
    Eigen::MatrixXd constant = eval(args[0]);
    if (i >= 1) constant.setZero();  // S_i(1,1,1) vanishes identically for i >= 1
    auto bi = prob.add_block("zonal" + std::to_string(i), constant);
    for (int j = 0; j < 6; ++j) prob.add_term(bi, x[static_cast<std::size_t>(j)], eval(args[static_cast<std::size_t>(j) + 1]));
  }

  prob.set_objective(Sense::maximize, {1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0}, 1.0);
  return prob;
}

SdpResult solve_primal_sdp(const TwoDistanceInstance& inst, const SolverOptions& opts) {
  ConicProblem prob = build_primal_sdp(inst);
  SdpResult r;
  r.solution = solve(prob, opts);
  switch (r.solution.status) {
    case SolveStatus::optimal:
      r.value = r.solution.objective_value;
      return r;
    case SolveStatus::unbounded:
      r.value = std::numeric_limits<double>::infinity();
      return r;
    default:
      throw SolverFailure("primal SDP " + to_string(r.solution.status) + " (" + r.solution.message + ") for " +
                              inst.describe(),
                          r.solution.status);
  }
}

double sdp_value(int n, int k, double a, int p, const SolverOptions& opts) {
  const double end = interval_end(k);
  if (!(a >= 0.0 && a <= end * (1.0 + 1e-12))) {
    throw std::invalid_argument("a=" + fmt17(a) + " outside I_" + std::to_string(k));
  }
  return solve_primal_sdp(TwoDistanceInstance::on_lrs_line(n, k, a, p), opts).value;
}

std::vector<SweepPoint> sweep(int n, int k, int p, int grid_points, const SolverOptions& opts, int jobs) {
  if (grid_points < 2) throw std::invalid_argument("sweep needs at least 2 grid points");
  const double end = interval_end(k);
  std::vector<SweepPoint> out(static_cast<std::size_t>(grid_points));
  for (int j = 0; j < grid_points; ++j) {
    out[static_cast<std::size_t>(j)].a = j == grid_points - 1 ? end : end * j / (grid_points - 1);
  }
  parallel_for(out.size(), jobs, [&](std::size_t j) {
    auto& pt = out[j];
    try {
      pt.value = sdp_value(n, k, pt.a, p, opts);
      pt.status = std::isinf(pt.value) ? SolveStatus::unbounded : SolveStatus::optimal;
    } catch (const SolverFailure& e) {
      pt.value = std::numeric_limits<double>::quiet_NaN();
      pt.status = e.status();
    }
  });
  return out;
}

double sweep_max(const std::vector<SweepPoint>& points) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& pt : points) {
    if (pt.status != SolveStatus::optimal && pt.status != SolveStatus::unbounded) continue;
    if (std::isnan(best) || pt.value > best) best = pt.value;
  }
  return best;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "a,sdp_value,status\n";
  for (const auto& pt : points) out << fmt17(pt.a) << ',' << fmt17(pt.value) << ',' << to_string(pt.status) << '\n';
}

}  // namespace twodist
