#pragma once

// Exact arithmetic in Z[L][L^-1, (L^b - 1)^-1 : b >= 1], the subring of the
// dimensionally completed Grothendieck ring in which every volume lives.

#include "motivic/numeric.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace motivic {

/// Dense univariate integer polynomial; coeffs[i] multiplies L^i. Trimmed.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Integer> coeffs);
  static IntPoly constant(const Integer& c);
  static IntPoly monomial(const Integer& c, int degree);

  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Integer>& coeffs() const { return coeffs_; }
  Integer coeff(int i) const;
  const Integer& leading() const { return coeffs_.back(); }

  IntPoly operator+(const IntPoly& o) const;
  IntPoly operator-(const IntPoly& o) const;
  IntPoly operator-() const;
  IntPoly operator*(const IntPoly& o) const;
  bool operator==(const IntPoly& o) const = default;

  /// Quotient by a monic divisor if the division is exact.
  std::optional<IntPoly> divide_exact(const IntPoly& monic) const;
  IntPoly shifted(int k) const;  // multiply by L^k, k >= 0
  Rational evaluate(const Rational& x) const;

 private:
  void trim();
  std::vector<Integer> coeffs_;
};

/// The n-th cyclotomic polynomial; L^b - 1 is the product of Phi_n over n | b.
const IntPoly& cyclotomic(int n);

/// Image of an element in M / F_m M: the terms c_k L^k with k > cutoff.
struct TruncatedSeries {
  int cutoff = 0;
  std::map<int, Integer> terms;

  TruncatedSeries truncate(int new_cutoff) const;
  bool operator==(const TruncatedSeries& o) const = default;
  std::string to_string() const;
};

/// An element P(L) / (L^a * prod Phi_n(L)^e_n) in canonical form.
///
/// Canonical form: P(0) != 0 (all powers of L live in the shift), and no
/// cyclotomic factor of the denominator divides P. The representation of a
/// ring element is therefore unique, so == is ring equality.
class MotClass {
 public:
  MotClass() = default;  // zero
  MotClass(long long n);  // NOLINT: integers embed implicitly
  static MotClass L();
  static MotClass L_pow(int k);
  /// 1 / (L^b - 1).
  static MotClass inverse_cyclo(int b);
  static MotClass from_poly(const IntPoly& p, int l_shift = 0);

  bool is_zero() const { return num_.is_zero(); }
  const IntPoly& numerator() const { return num_; }
  int l_shift() const { return l_shift_; }
  const std::map<int, int>& cyclotomic_exponents() const { return phi_exp_; }
  /// Denominator written as prod (L^b - 1)^m, with the numerator factor
  /// needed to compensate. Deterministic; used for rendering.
  std::vector<std::pair<int, int>> cyclo_factors() const;
  bool is_laurent_polynomial() const { return phi_exp_.empty(); }

  MotClass operator+(const MotClass& o) const;
  MotClass operator-(const MotClass& o) const;
  MotClass operator-() const;
  MotClass operator*(const MotClass& o) const;
  MotClass& operator+=(const MotClass& o) { return *this = *this + o; }
  MotClass& operator*=(const MotClass& o) { return *this = *this * o; }
  bool operator==(const MotClass& o) const = default;

  /// Multiplicative inverse when the numerator is a unit times cyclotomic
  /// factors; throws DomainError otherwise.
  MotClass inverse() const;

  /// Degree in L; nullopt stands for -infinity (the zero element).
  std::optional<int> vdim() const;
  TruncatedSeries expand(int cutoff) const;
  Rational specialize(long long q) const;
  /// 2^vdim, 0 for zero.
  Rational norm() const;

  std::string to_string() const;
  static MotClass parse(const std::string& text);

 private:
  void normalize();

  IntPoly num_;
  int l_shift_ = 0;
  std::map<int, int> phi_exp_;
};

/// Sum over n >= n0 of c * L^(-k n), in closed form. Throws DivergenceError for k <= 0.
MotClass geometric_sum(const MotClass& c, int k, int n0);

std::string to_string(const MotClass& x);

}  // namespace motivic
