#include "twodist/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "twodist/format.hpp"
#include "twodist/pipeline.hpp"

namespace twodist {

namespace {

// Orthonormal basis (columns) of {x in R^{n+1} : sum x = 0}, by Gram-Schmidt on e_i - e_{i+1}.
Eigen::MatrixXd hyperplane_basis(int n) {
  Eigen::MatrixXd basis(n + 1, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
    v(i) = 1.0;
    v(i + 1) = -1.0;
    for (int j = 0; j < i; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    basis.col(i) = v.normalized();
  }
  return basis;
}

}  // namespace

void PointSet::validate(double tol) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != n) throw std::invalid_argument("point " + std::to_string(i) + " has the wrong dimension");
    if (std::abs(points[i].norm() - 1.0) > tol) throw std::invalid_argument("point " + std::to_string(i) + " is not a unit vector");
  }
}

PointSet simplex_midpoint_set(int n) {
  if (n < 2) throw std::invalid_argument("simplex midpoint set needs n >= 2");
  const Eigen::MatrixXd basis = hyperplane_basis(n);
  PointSet ps;
  ps.n = n;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      Eigen::VectorXd x = Eigen::VectorXd::Constant(n + 1, -2.0 / (n + 1));
      x(i) += 1.0;
      x(j) += 1.0;
      ps.points.push_back((basis.transpose() * x).normalized());
    }
  }
  return ps;
}

PointSet regular_simplex(int n) {
  if (n < 1) throw std::invalid_argument("regular simplex needs n >= 1");
  const Eigen::MatrixXd basis = hyperplane_basis(n);
  PointSet ps;
  ps.n = n;
  for (int i = 0; i <= n; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n + 1, -1.0 / (n + 1));
    x(i) += 1.0;
    ps.points.push_back((basis.transpose() * x).normalized());
  }
  return ps;
}

TwoDistanceCheck verify_two_distance(const PointSet& ps, double tol) {
  if (ps.size() < 2) throw std::invalid_argument("need at least two points");
  std::vector<double> ips;
  ips.reserve(ps.size() * (ps.size() - 1) / 2);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) ips.push_back(ps.points[i].dot(ps.points[j]));
  }
  std::sort(ips.begin(), ips.end(), std::greater<>());

  TwoDistanceCheck out;
  bool wide = false;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= ips.size(); ++i) {
    if (i < ips.size() && ips[i - 1] - ips[i] <= tol) continue;
    double sum = 0.0;
    for (std::size_t j = start; j < i; ++j) sum += ips[j];
    out.centers.push_back(sum / static_cast<double>(i - start));
    wide = wide || ips[start] - ips[i - 1] > tol;
    start = i;
  }

  if (wide) {
    out.kind = DistanceKind::wide_cluster;
    out.message = "an inner-product cluster is wider than the tolerance";
  } else if (out.centers.size() == 1) {
    out.kind = DistanceKind::one_distance;
    out.message = "equidistant set: one inner product " + fmt17(out.centers[0]);
  } else if (out.centers.size() > 2) {
    out.kind = DistanceKind::many_distances;
    out.message = std::to_string(out.centers.size()) + " distinct inner products";
  } else {
    out.kind = DistanceKind::two_distance;
    out.ok = true;
    out.a = out.centers[0];
    out.b = out.centers[1];
  }
  return out;
}

std::optional<int> lrs_k(double a, double b, int n, double tol) {
  if (!(a > b)) throw std::invalid_argument("lrs_k expects a > b");
  for (int k : k_range(n)) {
    if (std::abs(b - (k * a - 1.0) / (k - 1.0)) <= tol) return k;
  }
  return std::nullopt;
}

void write_point_set(std::ostream& out, const PointSet& ps) {
  out << ps.n << ' ' << ps.size() << '\n';
  for (const auto& x : ps.points) {
    for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? " " : "") << fmt17(x(i));
    out << '\n';
  }
}

PointSet read_point_set(std::istream& in) {
  PointSet ps;
  long m = 0;
  if (!(in >> ps.n >> m) || ps.n < 1 || m < 0) throw std::invalid_argument("point file: bad header, expected \"n m\"");
  for (long j = 0; j < m; ++j) {
    Eigen::VectorXd x(ps.n);
    for (int i = 0; i < ps.n; ++i) {
      if (!(in >> x(i))) throw std::invalid_argument("point file: expected " + std::to_string(m) + " points of dimension " + std::to_string(ps.n));
    }
    ps.points.push_back(x);
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("point file: trailing data");
  ps.validate();
  return ps;
}

}  // namespace twodist
