#pragma once

// Sparse multivariate Laurent polynomials over Q and their fraction field.
// Variables are integer ids; by convention id 0 is the series variable t.

#include "motivic/numeric.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace motivic {

/// Sorted (var, exponent) pairs with nonzero exponents; exponents may be negative.
using Monomial = std::vector<std::pair<int, int>>;

/// Lex order with larger variable ids more significant.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

Monomial mono_mul(const Monomial& a, const Monomial& b);
int mono_exp(const Monomial& m, int var);

using VarNamer = std::function<std::string(int)>;
std::string default_var_name(int var);

class Poly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Poly() = default;
  Poly(long long c);  // NOLINT
  Poly(const Rational& c);  // NOLINT
  static Poly var(int id, int exp = 1);
  static Poly term(const Rational& c, Monomial m);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  const Terms& terms() const { return terms_; }
  std::vector<int> variables() const;
  bool has_var(int v) const;
  int degree_in(int v) const;
  int min_degree_in(int v) const;
  /// Coefficients with respect to v: exponent -> coefficient free of v.
  std::map<int, Poly> coeffs_in(int v) const;
  bool is_polynomial() const;  // no negative exponents
  const Rational& leading_coeff() const { return terms_.rbegin()->second; }
  const Monomial& leading_monomial() const { return terms_.rbegin()->first; }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly scaled(const Rational& c) const;
  Poly times_monomial(const Monomial& m) const;
  Poly pow(unsigned e) const;
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }

  Poly derivative(int v) const;
  /// Replaces v by q; negative exponents of v require q to be a monomial.
  Poly substitute(int v, const Poly& q) const;
  /// Componentwise minimum exponent over all terms (the monomial content).
  Monomial monomial_content() const;
  /// Divides by the monomial content; result is a polynomial with no monomial factor.
  Poly strip_monomial() const;
  Poly monic() const;

  std::string to_string(const VarNamer& name = default_var_name) const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  Terms terms_;
};

/// Quotient a / b when it is a Laurent polynomial.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
/// Monic gcd of the monomial-free parts (monomials are units).
Poly gcd(const Poly& a, const Poly& b);

/// Element of the fraction field, normalized: gcd(num, den) = 1, den has no
/// monomial factor and leading coefficient 1. Structural equality is equality.
class RatFunc {
 public:
  RatFunc() = default;
  RatFunc(long long c);  // NOLINT
  RatFunc(const Rational& c);  // NOLINT
  RatFunc(const Poly& p);  // NOLINT
  RatFunc(const Poly& num, const Poly& den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_poly() const { return den_ == Poly(1); }
  bool has_var(int v) const { return num_.has_var(v) || den_.has_var(v); }
  std::vector<int> variables() const;

  RatFunc operator+(const RatFunc& o) const;
  RatFunc operator-(const RatFunc& o) const;
  RatFunc operator-() const;
  RatFunc operator*(const RatFunc& o) const;
  RatFunc operator/(const RatFunc& o) const;
  RatFunc inverse() const;
  RatFunc pow(int e) const;
  bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }

  RatFunc derivative(int v) const;
  RatFunc substitute(int v, const RatFunc& q) const;
  /// Simultaneous substitution of several variables.
  RatFunc substitute(const std::map<int, RatFunc>& sub) const;

  std::string to_string(const VarNamer& name = default_var_name) const;

 private:
  void normalize();
  Poly num_;
  Poly den_ = Poly(1);
};

/// Symbolic determinant by cofactor expansion.
RatFunc determinant(const std::vector<std::vector<RatFunc>>& m);

}  // namespace motivic
