// Exact univariate and trivariate polynomial arithmetic over the rationals.
#pragma once

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace twodist {

using Rational = mpq_class;

/// Exact p/q. Throws std::invalid_argument when q == 0.
Rational make_rational(long num, long den = 1);

/// Parses "3", "-7/2" or a finite decimal literal such as "0.2" exactly.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& r);

/// Polynomial in one variable with exact coefficients; coeffs[d] multiplies a^d.
/// Canonical form: trailing coefficient nonzero, zero polynomial has no coefficients.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs);
  UniPoly(const Rational& constant);  // NOLINT(google-explicit-constructor)

  static UniPoly monomial(std::size_t degree, const Rational& coeff = 1);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  /// Coefficient of a^d, zero past the degree.
  Rational coeff(std::size_t d) const;
  bool is_zero() const { return coeffs_.empty(); }
  /// Degree of the polynomial; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  Rational eval(const Rational& a) const;
  double eval(double a) const;

  UniPoly& operator+=(const UniPoly& other);
  UniPoly& operator-=(const UniPoly& other);
  UniPoly& operator*=(const UniPoly& other);
  UniPoly& operator*=(const Rational& s);

  friend UniPoly operator+(UniPoly lhs, const UniPoly& rhs) { return lhs += rhs; }
  friend UniPoly operator-(UniPoly lhs, const UniPoly& rhs) { return lhs -= rhs; }
  friend UniPoly operator*(UniPoly lhs, const UniPoly& rhs) { return lhs *= rhs; }
  friend UniPoly operator*(UniPoly lhs, const Rational& s) { return lhs *= s; }
  friend UniPoly operator*(const Rational& s, UniPoly rhs) { return rhs *= s; }
  UniPoly operator-() const;

  friend bool operator==(const UniPoly& lhs, const UniPoly& rhs) { return lhs.coeffs_ == rhs.coeffs_; }

  UniPoly pow(unsigned e) const;
  /// Composition this(inner(a)).
  UniPoly compose(const UniPoly& inner) const;

  /// Least common multiple of coefficient denominators (1 for the zero polynomial).
  mpz_class denominator_lcm() const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// c0 + c1 * a, the shape every substitution for u, v, t takes here.
struct AffineForm {
  Rational c0;
  Rational c1;

  static AffineForm constant(const Rational& c) { return {c, 0}; }
  static AffineForm identity() { return {0, 1}; }

  UniPoly as_poly() const;
  Rational eval(const Rational& a) const { return c0 + c1 * a; }
  double eval(double a) const { return c0.get_d() + c1.get_d() * a; }
};

/// Exponent triple (i, j, l) of u^i v^j t^l.
using Exponents = std::array<int, 3>;

/// Sparse polynomial in (u, v, t); no stored term has a zero coefficient.
class TriPoly {
 public:
  TriPoly() = default;
  TriPoly(const Rational& constant);  // NOLINT(google-explicit-constructor)

  /// The coordinate polynomial u (var=0), v (var=1) or t (var=2).
  static TriPoly variable(int var);
  static TriPoly monomial(const Exponents& e, const Rational& coeff = 1);

  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  TriPoly& operator+=(const TriPoly& other);
  TriPoly& operator-=(const TriPoly& other);
  TriPoly& operator*=(const Rational& s);
  friend TriPoly operator+(TriPoly lhs, const TriPoly& rhs) { return lhs += rhs; }
  friend TriPoly operator-(TriPoly lhs, const TriPoly& rhs) { return lhs -= rhs; }
  friend TriPoly operator*(const TriPoly& lhs, const TriPoly& rhs);
  friend TriPoly operator*(TriPoly lhs, const Rational& s) { return lhs *= s; }
  friend bool operator==(const TriPoly& lhs, const TriPoly& rhs) { return lhs.terms_ == rhs.terms_; }

  TriPoly pow(unsigned e) const;

  /// Reorders arguments: result(u0, u1, u2) = this(u_{perm[0]}, u_{perm[1]}, u_{perm[2]}).
  TriPoly permuted(const std::array<int, 3>& perm) const;

  Rational eval(const Rational& u, const Rational& v, const Rational& t) const;
  double eval(double u, double v, double t) const;

 private:
  void add_term(const Exponents& e, const Rational& c);
  std::map<Exponents, Rational> terms_;
};

/// Expands p(u(a), v(a), t(a)) exactly.
UniPoly substitute_affine(const TriPoly& p, const std::array<AffineForm, 3>& assignments);

/// b_k(a) = (k a - 1)/(k - 1), the second inner product tied to a by the
/// Larman-Rogers-Seidel relation. Throws std::invalid_argument when k < 2.
AffineForm bk_of_a(int k);

/// (1 + a^2)^m f((a1 + a2 a^2)/(1 + a^2)) with m the declared degree bound of f.
/// Nonnegativity of f on [a1, a2] is equivalent to nonnegativity of the result on
/// the whole line. Throws std::invalid_argument when a1 >= a2 or deg f > m.
UniPoly fplus_transform(const UniPoly& f, const Rational& a1, const Rational& a2, int m);
/// Same with m = deg f.
UniPoly fplus_transform(const UniPoly& f, const Rational& a1, const Rational& a2);

/// Column d of the returned (2m+1) x (m+1) matrix holds the coefficients of
/// (a1 + a2 a^2)^d (1 + a^2)^(m-d), so fplus = T * coeffs(f).
std::vector<std::vector<Rational>> fplus_matrix(int m, const Rational& a1, const Rational& a2);

/// Monomial vector X = (1, a, ..., a^m) for the Gram representation f = X Q X^T.
struct SosBasis {
  int m = 0;
  std::size_t size() const { return static_cast<std::size_t>(m) + 1; }
  std::vector<double> eval(double a) const;
};

/// For every degree d = 0..2m, the Gram index pairs (i, j) with i + j = d.
std::vector<std::vector<std::pair<int, int>>> sos_coefficient_map(int m);

}  // namespace twodist
