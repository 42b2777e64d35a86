#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace motivic {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Integer numer(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denom(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return denom(r) == 1; }

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "a" or "a/b" with optional sign.
Rational parse_rational(const std::string& text);

Integer ipow(const Integer& base, unsigned exp);
Rational rpow(const Rational& base, int exp);

}  // namespace motivic
