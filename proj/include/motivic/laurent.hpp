#pragma once

// Truncated Laurent series over Q or F_p with explicit precision tracking.

#include "motivic/numeric.hpp"
#include "motivic/poly.hpp"

#include <climits>
#include <map>
#include <string>
#include <vector>

namespace motivic {

/// Number of coefficients past the valuation kept by inversion and series expansion.
int default_precision();
void set_default_precision(int n);

/// Coefficients at index >= precision are unknown; kExact means none are.
inline constexpr int kExact = INT_MAX;
/// ord_t of a known zero.
inline constexpr int kInfiniteOrder = INT_MAX;

class LaurentScalar {
 public:
  LaurentScalar() = default;  // exact zero over Q
  LaurentScalar(long long c);  // NOLINT
  LaurentScalar(const Rational& c);  // NOLINT
  LaurentScalar(std::map<int, Rational> terms, int precision = kExact, long long p = 0);
  static LaurentScalar monomial(const Rational& c, int k, long long p = 0);
  static LaurentScalar t() { return monomial(1, 1); }
  /// Polynomial in the variable t (id 0), exact.
  static LaurentScalar from_poly(const Poly& f);
  /// Series expansion of an element of Q(t); exact when the denominator is constant.
  static LaurentScalar from_ratfunc(const RatFunc& f, int terms = default_precision());

  long long characteristic() const { return p_; }
  bool is_exact() const { return prec_ == kExact; }
  int precision() const { return prec_; }
  bool is_known_zero() const { return terms_.empty() && is_exact(); }
  /// All known coefficients vanish.
  bool is_zero_to_precision() const { return terms_.empty(); }
  const std::map<int, Rational>& terms() const { return terms_; }
  Rational coeff(int j) const;
  /// Valuation; kInfiniteOrder for a known zero.
  int ord() const;
  /// Largest index with a nonzero coefficient (exact values only).
  int degree() const;

  LaurentScalar operator+(const LaurentScalar& o) const;
  LaurentScalar operator-(const LaurentScalar& o) const;
  LaurentScalar operator-() const;
  LaurentScalar operator*(const LaurentScalar& o) const;
  LaurentScalar inv(int terms = default_precision()) const;
  LaurentScalar pow(int e, int terms = default_precision()) const;
  LaurentScalar t_shift(int n) const;
  LaurentScalar truncated(int precision) const;
  LaurentScalar reduce_mod(long long p) const;
  bool operator==(const LaurentScalar& o) const = default;

  std::string to_string() const;
  static LaurentScalar parse(const std::string& text, long long p = 0);

 private:
  void normalize();
  std::map<int, Rational> terms_;
  int prec_ = kExact;
  long long p_ = 0;
};

int ord_t(const LaurentScalar& a);
LaurentScalar t_shift(const LaurentScalar& a, int n);

struct LaurentVector {
  std::vector<LaurentScalar> entries;

  std::size_t size() const { return entries.size(); }
  const LaurentScalar& operator[](std::size_t i) const { return entries[i]; }
  int precision_floor() const;
  /// Largest pole order among the entries (0 if all are integral).
  int pole_order() const;
  LaurentVector t_shift(int n) const;
  std::string to_string() const;
};

/// Evaluates f with variable ids bound by the assignment; the unbound id 0 is t itself.
LaurentScalar poly_eval(const Poly& f, const std::map<int, LaurentScalar>& assignment);
LaurentScalar ratfunc_eval(const RatFunc& f, const std::map<int, LaurentScalar>& assignment);

}  // namespace motivic
