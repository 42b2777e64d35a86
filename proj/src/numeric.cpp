#include "motivic/numeric.hpp"

#include "motivic/errors.hpp"

#include <cctype>

namespace motivic {

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw ParseError("empty rational literal");
  auto valid_int = [](const std::string& part) {
    std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (i >= part.size()) return false;
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    }
    return true;
  };
  auto strip_plus = [](std::string part) {
    if (!part.empty() && part[0] == '+') part.erase(0, 1);
    return part;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!valid_int(s)) throw ParseError("bad rational literal '" + text + "'");
    return Rational(Integer(strip_plus(s)));
  }
  const std::string a = s.substr(0, slash);
  const std::string b = s.substr(slash + 1);
  if (!valid_int(a) || !valid_int(b)) throw ParseError("bad rational literal '" + text + "'");
  const Integer den(strip_plus(b));
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return Rational(Integer(strip_plus(a)), den);
}

Integer ipow(const Integer& base, unsigned exp) {
  Integer result = 1;
  Integer b = base;
  while (exp > 0) {
    if (exp & 1U) result *= b;
    b *= b;
    exp >>= 1U;
  }
  return result;
}

Rational rpow(const Rational& base, int exp) {
  if (exp >= 0) {
    return Rational(ipow(numer(base), static_cast<unsigned>(exp)),
                    ipow(denom(base), static_cast<unsigned>(exp)));
  }
  if (base == 0) throw DomainError("zero raised to a negative power");
  return Rational(ipow(denom(base), static_cast<unsigned>(-exp)),
                  ipow(numer(base), static_cast<unsigned>(-exp)));
}

}  // namespace motivic
