#include "motivic/laurent.hpp"

#include "motivic/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>

namespace motivic {

namespace {

std::atomic<int> g_precision{24};

Rational mod_p(const Rational& c, long long p) {
  if (p == 0) return c;
  const Integer pp(p);
  Integer d = denom(c) % pp;
  if (d == 0) throw DomainError("coefficient " + c.str() + " has p in its denominator, p = " + std::to_string(p));
  Integer inv;
  mpz_invert(inv.backend().data(), d.backend().data(), pp.backend().data());
  Integer r = (numer(c) * inv) % pp;
  if (r < 0) r += pp;
  return Rational(r);
}

Rational field_div(const Rational& a, const Rational& b, long long p) {
  if (p == 0) return a / b;
  return mod_p(a / b, p);
}

int sat_add(int a, int b) {
  if (a == kExact || b == kExact) return kExact;
  return a + b;
}

void check_field(long long p, long long q) {
  if (p != q) {
    throw FieldMismatchError("Laurent scalars over different fields (characteristic " + std::to_string(p) + " vs " +
                             std::to_string(q) + ")");
  }
}

}  // namespace

int default_precision() { return g_precision.load(); }

void set_default_precision(int n) {
  if (n < 1) throw DomainError("precision must be positive");
  g_precision.store(n);
}

LaurentScalar::LaurentScalar(long long c) {
  if (c != 0) terms_.emplace(0, Rational(c));
}

LaurentScalar::LaurentScalar(const Rational& c) {
  if (c != 0) terms_.emplace(0, c);
}

LaurentScalar::LaurentScalar(std::map<int, Rational> terms, int precision, long long p)
    : terms_(std::move(terms)), prec_(precision), p_(p) {
  normalize();
}

LaurentScalar LaurentScalar::monomial(const Rational& c, int k, long long p) {
  return LaurentScalar(std::map<int, Rational>{{k, c}}, kExact, p);
}

void LaurentScalar::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (p_ != 0) it->second = mod_p(it->second, p_);
    it = (it->second == 0 || it->first >= prec_) ? terms_.erase(it) : std::next(it);
  }
}

LaurentScalar LaurentScalar::from_poly(const Poly& f) {
  std::map<int, Rational> out;
  for (const auto& [m, c] : f.terms()) {
    int k = 0;
    for (const auto& [v, e] : m) {
      if (v != 0) throw DomainError("polynomial in variables other than t: " + f.to_string());
      k = e;
    }
    out[k] += c;
  }
  return LaurentScalar(std::move(out));
}

LaurentScalar LaurentScalar::from_ratfunc(const RatFunc& f, int terms) {
  const LaurentScalar num = from_poly(f.num());
  if (f.is_poly()) return num;
  return num * from_poly(f.den()).inv(terms);
}

Rational LaurentScalar::coeff(int j) const {
  if (j >= prec_) throw IndeterminateError("coefficient t^" + std::to_string(j) + " is beyond precision");
  auto it = terms_.find(j);
  return it == terms_.end() ? Rational(0) : it->second;
}

int LaurentScalar::ord() const {
  if (!terms_.empty()) return terms_.begin()->first;
  if (is_exact()) return kInfiniteOrder;
  throw IndeterminateError("order undetermined: all coefficients below t^" + std::to_string(prec_) + " vanish");
}

int LaurentScalar::degree() const {
  if (!is_exact()) throw IndeterminateError("degree of an inexact series");
  return terms_.empty() ? 0 : terms_.rbegin()->first;
}

LaurentScalar LaurentScalar::operator+(const LaurentScalar& o) const {
  check_field(p_, o.p_);
  std::map<int, Rational> out = terms_;
  for (const auto& [k, c] : o.terms_) out[k] += c;
  return LaurentScalar(std::move(out), std::min(prec_, o.prec_), p_);
}

LaurentScalar LaurentScalar::operator-() const {
  LaurentScalar r = *this;
  for (auto& [k, c] : r.terms_) c = -c;
  r.normalize();
  return r;
}

LaurentScalar LaurentScalar::operator-(const LaurentScalar& o) const { return *this + (-o); }

LaurentScalar LaurentScalar::operator*(const LaurentScalar& o) const {
  check_field(p_, o.p_);
  if (is_known_zero() || o.is_known_zero()) return LaurentScalar(std::map<int, Rational>{}, kExact, p_);
  // A series with no known nonzero term is bounded below by its precision.
  const int low_a = terms_.empty() ? prec_ : terms_.begin()->first;
  const int low_b = o.terms_.empty() ? o.prec_ : o.terms_.begin()->first;
  const int prec = std::min(sat_add(low_a, o.prec_), sat_add(low_b, prec_));
  std::map<int, Rational> out;
  for (const auto& [i, a] : terms_) {
    for (const auto& [j, b] : o.terms_) {
      if (i + j >= prec) break;
      out[i + j] += a * b;
    }
  }
  return LaurentScalar(std::move(out), prec, p_);
}

LaurentScalar LaurentScalar::inv(int terms) const {
  if (terms_.empty()) {
    throw IndeterminateError(is_exact() ? "inverse of zero" : "inverse of a series that is zero to precision");
  }
  const int v = terms_.begin()->first;
  // Exact monomials invert exactly.
  if (is_exact() && terms_.size() == 1) {
    return LaurentScalar(std::map<int, Rational>{{-v, field_div(1, terms_.begin()->second, p_)}}, kExact, p_);
  }
  const int n = is_exact() ? terms : std::min(terms, prec_ - v);
  std::vector<Rational> a(static_cast<std::size_t>(n), Rational(0));
  for (const auto& [k, c] : terms_) {
    if (k - v < n) a[static_cast<std::size_t>(k - v)] = c;
  }
  std::vector<Rational> b(static_cast<std::size_t>(n), Rational(0));
  b[0] = field_div(1, a[0], p_);
  for (int k = 1; k < n; ++k) {
    Rational acc = 0;
    for (int i = 1; i <= k; ++i) acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(k - i)];
    b[static_cast<std::size_t>(k)] = field_div(-acc, a[0], p_);
  }
  std::map<int, Rational> out;
  for (int k = 0; k < n; ++k) out.emplace(k - v, b[static_cast<std::size_t>(k)]);
  return LaurentScalar(std::move(out), n - v, p_);
}

LaurentScalar LaurentScalar::pow(int e, int terms) const {
  if (e < 0) return inv(terms).pow(-e, terms);
  LaurentScalar r(std::map<int, Rational>{{0, Rational(1)}}, kExact, p_);
  for (int i = 0; i < e; ++i) r = r * *this;
  return r;
}

LaurentScalar LaurentScalar::t_shift(int n) const {
  std::map<int, Rational> out;
  for (const auto& [k, c] : terms_) out.emplace(k + n, c);
  return LaurentScalar(std::move(out), sat_add(prec_, n), p_);
}

LaurentScalar LaurentScalar::truncated(int precision) const {
  return LaurentScalar(terms_, std::min(prec_, precision), p_);
}

LaurentScalar LaurentScalar::reduce_mod(long long p) const {
  if (p_ != 0) {
    check_field(p_, p);
    return *this;
  }
  return LaurentScalar(terms_, prec_, p);
}

std::string LaurentScalar::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c0] : terms_) {
    Rational c = c0;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (c < 0) c = -c;
    if (k == 0) {
      os << c;
    } else {
      if (c != 1) os << c << "*";
      os << "t";
      if (k != 1) os << "^" << k;
    }
    first = false;
  }
  if (!is_exact()) {
    if (!first) os << " + ";
    os << "O(t^" << prec_ << ")";
  } else if (first) {
    os << "0";
  }
  return os.str();
}

LaurentScalar LaurentScalar::parse(const std::string& text, long long p) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw ParseError("empty Laurent series");
  std::map<int, Rational> terms;
  int prec = kExact;
  std::size_t pos = 0;
  auto read_int = [&](std::size_t& i) {
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start || !std::isdigit(static_cast<unsigned char>(s[i - 1]))) {
      throw ParseError("expected integer in Laurent series '" + text + "'");
    }
    return std::stoi(s.substr(start, i - start));
  };
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    }
    if (s.compare(pos, 4, "O(t^") == 0) {
      pos += 4;
      prec = read_int(pos);
      if (pos >= s.size() || s[pos] != ')') throw ParseError("expected ')' in '" + text + "'");
      ++pos;
      continue;
    }
    Rational c = 1;
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::size_t start = pos;
      while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/')) ++pos;
      c = parse_rational(s.substr(start, pos - start));
      if (pos < s.size() && s[pos] == '*') ++pos;
    }
    int k = 0;
    if (pos < s.size() && s[pos] == 't') {
      ++pos;
      k = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        k = read_int(pos);
      }
    } else if (pos < s.size() && s[pos] != '+' && s[pos] != '-') {
      throw ParseError("unexpected '" + std::string(1, s[pos]) + "' in Laurent series '" + text + "'");
    }
    terms[k] += sign * c;
  }
  return LaurentScalar(std::move(terms), prec, p);
}

int ord_t(const LaurentScalar& a) { return a.ord(); }

LaurentScalar t_shift(const LaurentScalar& a, int n) { return a.t_shift(n); }

int LaurentVector::precision_floor() const {
  int p = kExact;
  for (const auto& e : entries) p = std::min(p, e.precision());
  return p;
}

int LaurentVector::pole_order() const {
  int pole = 0;
  for (const auto& e : entries) {
    if (!e.terms().empty()) pole = std::max(pole, -e.terms().begin()->first);
  }
  return pole;
}

LaurentVector LaurentVector::t_shift(int n) const {
  LaurentVector out;
  for (const auto& e : entries) out.entries.push_back(e.t_shift(n));
  return out;
}

std::string LaurentVector::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) s += ", ";
    s += entries[i].to_string();
  }
  return s + ")";
}

LaurentScalar poly_eval(const Poly& f, const std::map<int, LaurentScalar>& assignment) {
  long long p = assignment.empty() ? 0 : assignment.begin()->second.characteristic();
  LaurentScalar zero(std::map<int, Rational>{}, kExact, p);
  LaurentScalar acc = zero;
  std::map<std::pair<int, int>, LaurentScalar> powers;
  for (const auto& [m, c] : f.terms()) {
    LaurentScalar term(std::map<int, Rational>{{0, c}}, kExact, p);
    for (const auto& [v, e] : m) {
      auto key = std::make_pair(v, e);
      auto it = powers.find(key);
      if (it == powers.end()) {
        auto a = assignment.find(v);
        LaurentScalar base;
        if (a != assignment.end()) {
          base = a->second;
        } else if (v == 0) {
          base = LaurentScalar::monomial(1, 1, p);
        } else {
          throw DomainError("no value bound for variable " + std::to_string(v));
        }
        it = powers.emplace(key, base.pow(e)).first;
      }
      term = term * it->second;
    }
    acc = acc + term;
  }
  return acc;
}

LaurentScalar ratfunc_eval(const RatFunc& f, const std::map<int, LaurentScalar>& assignment) {
  const LaurentScalar num = poly_eval(f.num(), assignment);
  if (f.is_poly()) return num;
  return num * poly_eval(f.den(), assignment).inv();
}

}  // namespace motivic
