#include "twodist/zonal.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "twodist/gegenbauer.hpp"

namespace twodist {

namespace {

constexpr std::array<std::array<int, 3>, 6> kPermutations{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

// sum_l g_l (t - uv)^(k-2l) ((1-u^2)(1-v^2))^l, the k-dependent factor of Y_k.
TriPoly radial_factor(const GegenbauerTable& g, int k) {
  const TriPoly u = TriPoly::variable(0), v = TriPoly::variable(1), t = TriPoly::variable(2);
  const TriPoly shifted = t - u * v;
  const TriPoly radicand = (TriPoly(Rational(1)) - u * u) * (TriPoly(Rational(1)) - v * v);
  const UniPoly& gk = g.poly(k);
  TriPoly out;
  for (int l = 0; 2 * l <= k; ++l) {
    Rational c = gk.coeff(static_cast<std::size_t>(k - 2 * l));
    if (c == 0) continue;
    out += shifted.pow(static_cast<unsigned>(k - 2 * l)) * radicand.pow(static_cast<unsigned>(l)) * c;
  }
  return out;
}

TriPoly uv_monomial(int i, int j) { return TriPoly::monomial({i, j, 0}); }

void check_args(int n, int p, int k) {
  if (n < 3) throw std::invalid_argument("zonal matrices require n >= 3");
  if (p < 0 || k < 0 || k > p) {
    throw std::invalid_argument("zonal matrix index k=" + std::to_string(k) + " outside 0..p=" + std::to_string(p));
  }
}

TriPolyMatrix symmetrized(const TriPoly& radial, int size) {
  TriPolyMatrix m(static_cast<std::size_t>(size), std::vector<TriPoly>(static_cast<std::size_t>(size)));
  const Rational sixth = make_rational(1, 6);
  for (int i = 0; i < size; ++i) {
    for (int j = i; j < size; ++j) {
      const TriPoly y = uv_monomial(i, j) * radial;
      TriPoly acc;
      for (const auto& perm : kPermutations) acc += y.permuted(perm);
      acc *= sixth;
      m[i][j] = acc;
      if (i != j) m[j][i] = acc;
    }
  }
  return m;
}

}  // namespace

TriPoly y_entry_poly(int n, int k, int i, int j) {
  if (n < 3) throw std::invalid_argument("zonal matrices require n >= 3");
  if (k < 0 || i < 0 || j < 0) throw std::invalid_argument("zonal entry indices must be nonnegative");
  GegenbauerTable g(n - 1, k);
  return uv_monomial(i, j) * radial_factor(g, k);
}

TriPolyMatrix s_matrix_poly(int n, int p, int k) {
  check_args(n, p, k);
  GegenbauerTable g(n - 1, k);
  return symmetrized(radial_factor(g, k), p - k + 1);
}

ZonalMatrixSet::ZonalMatrixSet(int n, int p) : n_(n), p_(p) {
  check_args(n, p, 0);
  GegenbauerTable g(n - 1, p);
  entries_.reserve(static_cast<std::size_t>(p) + 1);
  numeric_.reserve(static_cast<std::size_t>(p) + 1);
  for (int k = 0; k <= p; ++k) {
    entries_.push_back(symmetrized(radial_factor(g, k), p - k + 1));
    const auto& mk = entries_.back();
    std::vector<std::vector<std::vector<Term>>> num(mk.size(), std::vector<std::vector<Term>>(mk.size()));
    for (std::size_t i = 0; i < mk.size(); ++i) {
      for (std::size_t j = 0; j < mk.size(); ++j) {
        for (const auto& [e, c] : mk[i][j].terms()) num[i][j].push_back({e[0], e[1], e[2], c.get_d()});
      }
    }
    numeric_.push_back(std::move(num));
  }
}

const TriPolyMatrix& ZonalMatrixSet::poly(int k) const {
  check_args(n_, p_, k);
  return entries_[static_cast<std::size_t>(k)];
}

Eigen::MatrixXd ZonalMatrixSet::eval(int k, double u, double v, double t) const {
  check_args(n_, p_, k);
  const int deg = 2 * p_ + 2;
  std::vector<double> pu(deg + 1), pv(deg + 1), pt(deg + 1);
  pu[0] = pv[0] = pt[0] = 1.0;
  for (int q = 1; q <= deg; ++q) {
    pu[q] = pu[q - 1] * u;
    pv[q] = pv[q - 1] * v;
    pt[q] = pt[q - 1] * t;
  }
  const auto& num = numeric_[static_cast<std::size_t>(k)];
  const auto size = static_cast<Eigen::Index>(num.size());
  Eigen::MatrixXd out(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i; j < size; ++j) {
      double acc = 0.0;
      for (const auto& term : num[i][j]) acc += term.c * pu[term.i] * pv[term.j] * pt[term.l];
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

UniPolyMatrix ZonalMatrixSet::substitute(int k, const std::array<AffineForm, 3>& uvt) const {
  const auto& mk = poly(k);
  UniPolyMatrix out(mk.size(), std::vector<UniPoly>(mk.size()));
  for (std::size_t i = 0; i < mk.size(); ++i) {
    for (std::size_t j = i; j < mk.size(); ++j) {
      out[i][j] = substitute_affine(mk[i][j], uvt);
      if (i != j) out[j][i] = out[i][j];
    }
  }
  return out;
}

std::shared_ptr<const ZonalMatrixSet> zonal_set(int n, int p) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ZonalMatrixSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, p}];
  if (!slot) slot = std::make_shared<const ZonalMatrixSet>(n, p);
  return slot;
}

Eigen::MatrixXd s_matrix_eval(int n, int p, int k, double u, double v, double t) {
  return zonal_set(n, p)->eval(k, u, v, t);
}

}  // namespace twodist
