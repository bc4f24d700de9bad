#include "twodist/poly.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace twodist {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('/') != std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + text);
    if (r.get_den() == 0) throw std::invalid_argument("rational with zero denominator: " + text);
    r.canonicalize();
    return r;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = (s[pos++] == '-');
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("bad rational literal: " + text);
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("bad rational literal: " + text);
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(pos + 1), &used);
      if (used != s.size() - pos - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad rational literal: " + text);
    }
  }
  mpz_class num(digits, 10);
  long shift = exponent - scale;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational r = shift < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

UniPoly::UniPoly(const Rational& constant) {
  if (constant != 0) coeffs_.push_back(constant);
}

UniPoly UniPoly::monomial(std::size_t degree, const Rational& coeff) {
  std::vector<Rational> c(degree + 1, Rational(0));
  c[degree] = coeff;
  return UniPoly(std::move(c));
}

Rational UniPoly::coeff(std::size_t d) const { return d < coeffs_.size() ? coeffs_[d] : Rational(0); }

Rational UniPoly::eval(const Rational& a) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * a + *it;
  return acc;
}

double UniPoly::eval(double a) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * a + it->get_d();
  return acc;
}

UniPoly& UniPoly::operator+=(const UniPoly& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), Rational(0));
  for (std::size_t d = 0; d < other.coeffs_.size(); ++d) coeffs_[d] += other.coeffs_[d];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), Rational(0));
  for (std::size_t d = 0; d < other.coeffs_.size(); ++d) coeffs_[d] -= other.coeffs_[d];
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(const UniPoly& other) {
  if (is_zero() || other.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> out(coeffs_.size() + other.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * other.coeffs_[j];
  }
  coeffs_ = std::move(out);
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(const Rational& s) {
  if (s == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& c : coeffs_) c *= s;
  return *this;
}

UniPoly UniPoly::operator-() const {
  UniPoly r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

UniPoly UniPoly::pow(unsigned e) const {
  UniPoly result(Rational(1));
  UniPoly base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e > 0) base *= base;
  }
  return result;
}

UniPoly UniPoly::compose(const UniPoly& inner) const {
  UniPoly acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= inner;
    acc += UniPoly(*it);
  }
  return acc;
}

mpz_class UniPoly::denominator_lcm() const {
  mpz_class l = 1;
  for (const auto& c : coeffs_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

UniPoly AffineForm::as_poly() const { return UniPoly(std::vector<Rational>{c0, c1}); }

// ---------------------------------------------------------------- TriPoly

TriPoly::TriPoly(const Rational& constant) {
  if (constant != 0) terms_.emplace(Exponents{0, 0, 0}, constant);
}

TriPoly TriPoly::variable(int var) {
  if (var < 0 || var > 2) throw std::invalid_argument("TriPoly variable index must be 0, 1 or 2");
  Exponents e{0, 0, 0};
  e[static_cast<std::size_t>(var)] = 1;
  return monomial(e);
}

TriPoly TriPoly::monomial(const Exponents& e, const Rational& coeff) {
  TriPoly p;
  p.add_term(e, coeff);
  return p;
}

int TriPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

void TriPoly::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

TriPoly& TriPoly::operator+=(const TriPoly& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

TriPoly& TriPoly::operator-=(const TriPoly& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

TriPoly& TriPoly::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

TriPoly operator*(const TriPoly& lhs, const TriPoly& rhs) {
  TriPoly out;
  for (const auto& [e1, c1] : lhs.terms_) {
    for (const auto& [e2, c2] : rhs.terms_) {
      out.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
    }
  }
  return out;
}

TriPoly TriPoly::pow(unsigned e) const {
  TriPoly result(Rational(1));
  TriPoly base = *this;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

TriPoly TriPoly::permuted(const std::array<int, 3>& perm) const {
  // Substituting u_{perm[q]} for variable q moves exponent e[q] to slot perm[q].
  TriPoly out;
  for (const auto& [e, c] : terms_) {
    Exponents moved{0, 0, 0};
    for (std::size_t q = 0; q < 3; ++q) moved[static_cast<std::size_t>(perm[q])] += e[q];
    out.add_term(moved, c);
  }
  return out;
}

namespace {

template <typename T>
std::vector<T> powers(const T& x, int max_exp) {
  std::vector<T> out(static_cast<std::size_t>(std::max(max_exp, 0)) + 1);
  out[0] = T(1);
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[i - 1] * x;
  return out;
}

}  // namespace

Rational TriPoly::eval(const Rational& u, const Rational& v, const Rational& t) const {
  int deg = std::max(total_degree(), 0);
  auto pu = powers(u, deg), pv = powers(v, deg), pt = powers(t, deg);
  Rational acc = 0;
  for (const auto& [e, c] : terms_) acc += c * pu[e[0]] * pv[e[1]] * pt[e[2]];
  return acc;
}

double TriPoly::eval(double u, double v, double t) const {
  int deg = std::max(total_degree(), 0);
  auto pu = powers(u, deg), pv = powers(v, deg), pt = powers(t, deg);
  double acc = 0.0;
  for (const auto& [e, c] : terms_) acc += c.get_d() * pu[e[0]] * pv[e[1]] * pt[e[2]];
  return acc;
}

UniPoly substitute_affine(const TriPoly& p, const std::array<AffineForm, 3>& assignments) {
  int deg = std::max(p.total_degree(), 0);
  std::array<std::vector<UniPoly>, 3> pw;
  for (std::size_t q = 0; q < 3; ++q) {
    UniPoly base = assignments[q].as_poly();
    pw[q].reserve(static_cast<std::size_t>(deg) + 1);
    pw[q].emplace_back(Rational(1));
    for (int i = 1; i <= deg; ++i) pw[q].push_back(pw[q].back() * base);
  }
  UniPoly out;
  for (const auto& [e, c] : p.terms()) out += c * (pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]]);
  return out;
}

AffineForm bk_of_a(int k) {
  if (k < 2) throw std::invalid_argument("b_k(a) requires k >= 2");
  return {make_rational(-1, k - 1), make_rational(k, k - 1)};
}

std::vector<std::vector<Rational>> fplus_matrix(int m, const Rational& a1, const Rational& a2) {
  if (m < 0) throw std::invalid_argument("fplus degree bound must be nonnegative");
  if (a1 >= a2) throw std::invalid_argument("fplus interval requires a1 < a2");
  const UniPoly numerator(std::vector<Rational>{a1, 0, a2});
  const UniPoly one_plus_sq(std::vector<Rational>{1, 0, 1});
  std::vector<std::vector<Rational>> t(static_cast<std::size_t>(2 * m + 1),
                                       std::vector<Rational>(static_cast<std::size_t>(m + 1), Rational(0)));
  for (int d = 0; d <= m; ++d) {
    UniPoly col = numerator.pow(static_cast<unsigned>(d)) * one_plus_sq.pow(static_cast<unsigned>(m - d));
    for (std::size_t e = 0; e < col.coeffs().size(); ++e) t[e][static_cast<std::size_t>(d)] = col.coeffs()[e];
  }
  return t;
}

UniPoly fplus_transform(const UniPoly& f, const Rational& a1, const Rational& a2, int m) {
  if (f.degree() > m) throw std::invalid_argument("fplus degree bound below polynomial degree");
  auto t = fplus_matrix(m, a1, a2);
  std::vector<Rational> out(t.size(), Rational(0));
  for (std::size_t e = 0; e < t.size(); ++e) {
    for (std::size_t d = 0; d < f.coeffs().size(); ++d) out[e] += t[e][d] * f.coeffs()[d];
  }
  return UniPoly(std::move(out));
}

UniPoly fplus_transform(const UniPoly& f, const Rational& a1, const Rational& a2) {
  return fplus_transform(f, a1, a2, std::max(f.degree(), 0));
}

std::vector<double> SosBasis::eval(double a) const {
  std::vector<double> x(size());
  double p = 1.0;
  for (auto& xi : x) {
    xi = p;
    p *= a;
  }
  return x;
}

std::vector<std::vector<std::pair<int, int>>> sos_coefficient_map(int m) {
  if (m < 0) throw std::invalid_argument("SOS half-degree must be nonnegative");
  std::vector<std::vector<std::pair<int, int>>> out(static_cast<std::size_t>(2 * m + 1));
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) out[static_cast<std::size_t>(i + j)].emplace_back(i, j);
  }
  return out;
}

}  // namespace twodist
