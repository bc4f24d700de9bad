#include "twodist/gegenbauer.hpp"

#include <stdexcept>
#include <string>

namespace twodist {

GegenbauerTable::GegenbauerTable(int n, int max_degree) : n_(n) {
  if (n < 2) throw std::invalid_argument("Gegenbauer table requires n >= 2");
  if (max_degree < 0) throw std::invalid_argument("Gegenbauer table requires max_degree >= 0");
  polys_.reserve(static_cast<std::size_t>(max_degree) + 1);
  polys_.emplace_back(Rational(1));
  if (max_degree >= 1) polys_.push_back(UniPoly::monomial(1));
  const UniPoly t = UniPoly::monomial(1);
  for (int k = 2; k <= max_degree; ++k) {
    UniPoly next = make_rational(2 * k + n - 4) * (t * polys_[k - 1]) - make_rational(k - 1) * polys_[k - 2];
    next *= make_rational(1, k + n - 3);
    polys_.push_back(std::move(next));
  }
  numeric_.reserve(polys_.size());
  for (const auto& p : polys_) {
    std::vector<double> c;
    c.reserve(p.coeffs().size());
    for (const auto& q : p.coeffs()) c.push_back(q.get_d());
    numeric_.push_back(std::move(c));
  }
}

const UniPoly& GegenbauerTable::poly(int k) const {
  if (k < 0 || k > max_degree()) {
    throw std::out_of_range("Gegenbauer degree " + std::to_string(k) + " outside table of degree " +
                            std::to_string(max_degree()));
  }
  return polys_[static_cast<std::size_t>(k)];
}

double GegenbauerTable::eval(int k, double t) const {
  poly(k);
  const auto& c = numeric_[static_cast<std::size_t>(k)];
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

}  // namespace twodist
