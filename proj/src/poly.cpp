#include "motivic/poly.hpp"

#include "motivic/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace motivic {

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  auto ia = a.rbegin();
  auto ib = b.rbegin();
  while (ia != a.rend() || ib != b.rend()) {
    // The larger variable present decides; absent means exponent 0.
    int va = ia != a.rend() ? ia->first : -1;
    int vb = ib != b.rend() ? ib->first : -1;
    int ea = 0;
    int eb = 0;
    const int v = std::max(va, vb);
    if (va == v) ea = (ia++)->second;
    if (vb == v) eb = (ib++)->second;
    if (ea != eb) return ea < eb;
  }
  return false;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      const int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

int mono_exp(const Monomial& m, int var) {
  for (const auto& [v, e] : m) {
    if (v == var) return e;
  }
  return 0;
}

namespace {

Monomial mono_inv(const Monomial& m) {
  Monomial out = m;
  for (auto& [v, e] : out) e = -e;
  return out;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (const auto& [v, e] : a) {
    if (mono_exp(b, v) < e) return false;
  }
  return true;
}

}  // namespace

std::string default_var_name(int var) {
  if (var == 0) return "t";
  return "v" + std::to_string(var);
}

// ------------------------------------------------------------------- Poly

Poly::Poly(long long c) {
  if (c != 0) terms_.emplace(Monomial{}, Rational(c));
}

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::var(int id, int exp) {
  Poly p;
  p.terms_.emplace(exp == 0 ? Monomial{} : Monomial{{id, exp}}, Rational(1));
  return p;
}

Poly Poly::term(const Rational& c, Monomial m) {
  Poly p;
  if (c != 0) p.terms_.emplace(std::move(m), c);
  return p;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::vector<int> Poly::variables() const {
  std::set<int> vs;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m) vs.insert(v);
  }
  return {vs.begin(), vs.end()};
}

bool Poly::has_var(int v) const {
  for (const auto& [m, c] : terms_) {
    if (mono_exp(m, v) != 0) return true;
  }
  return false;
}

int Poly::degree_in(int v) const {
  int d = 0;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const int e = mono_exp(m, v);
    d = first ? e : std::max(d, e);
    first = false;
  }
  return d;
}

int Poly::min_degree_in(int v) const {
  int d = 0;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const int e = mono_exp(m, v);
    d = first ? e : std::min(d, e);
    first = false;
  }
  return d;
}

std::map<int, Poly> Poly::coeffs_in(int v) const {
  std::map<int, Poly> out;
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    int e = 0;
    for (const auto& p : m) {
      if (p.first == v) {
        e = p.second;
      } else {
        rest.push_back(p);
      }
    }
    out[e].add_term(rest, c);
  }
  return out;
}

bool Poly::is_polynomial() const {
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m) {
      if (e < 0) return false;
    }
  }
  return true;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
  }
  return r;
}

Poly Poly::scaled(const Rational& c) const {
  if (c == 0) return {};
  Poly r = *this;
  for (auto& [m, k] : r.terms_) k *= c;
  return r;
}

Poly Poly::times_monomial(const Monomial& mono) const {
  Poly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(mono_mul(m, mono), c);
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly result(1);
  Poly base = *this;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

Poly Poly::derivative(int v) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    const int e = mono_exp(m, v);
    if (e == 0) continue;
    r.add_term(mono_mul(m, Monomial{{v, -1}}), c * e);
  }
  return r;
}

Poly Poly::substitute(int v, const Poly& q) const {
  auto parts = coeffs_in(v);
  if (parts.size() == 1 && parts.begin()->first == 0) return *this;
  std::optional<Poly> q_inv;
  if (parts.begin()->first < 0) {
    if (q.terms_.size() != 1) throw DomainError("negative power substituted by a non-monomial");
    const auto& [m, c] = *q.terms_.begin();
    q_inv = Poly::term(1 / c, mono_inv(m));
  }
  Poly r;
  for (const auto& [e, c] : parts) {
    r += c * (e >= 0 ? q.pow(static_cast<unsigned>(e)) : q_inv->pow(static_cast<unsigned>(-e)));
  }
  return r;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return {};
  std::map<int, int> low;
  for (const auto& v : variables()) low[v] = min_degree_in(v);
  Monomial out;
  for (const auto& [v, e] : low) {
    if (e != 0) out.emplace_back(v, e);
  }
  return out;
}

Poly Poly::strip_monomial() const { return times_monomial(mono_inv(monomial_content())); }

Poly Poly::monic() const {
  if (is_zero()) return {};
  return scaled(1 / leading_coeff());
}

std::string Poly::to_string(const VarNamer& name) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    Rational c = it->second;
    const Monomial& m = it->first;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (c < 0) c = -c;
    bool wrote = false;
    if (c != 1 || m.empty()) {
      os << c;
      wrote = true;
    }
    for (auto mi = m.rbegin(); mi != m.rend(); ++mi) {
      if (wrote) os << "*";
      os << name(mi->first);
      if (mi->second != 1) os << "^" << mi->second;
      wrote = true;
    }
    first = false;
  }
  return os.str();
}

// --------------------------------------------------- division and gcd

namespace {

// Exact division of polynomials (nonnegative exponents) by the lex division algorithm.
std::optional<Poly> divide_poly(Poly a, const Poly& b) {
  if (b.is_zero()) throw DomainError("division by zero polynomial");
  Poly q;
  const Monomial& lb = b.leading_monomial();
  const Rational lcb = b.leading_coeff();
  while (!a.is_zero()) {
    const Monomial la = a.leading_monomial();
    if (!mono_divides(lb, la)) return std::nullopt;
    Poly step = Poly::term(a.leading_coeff() / lcb, mono_mul(la, mono_inv(lb)));
    q += step;
    a -= step * b;
  }
  return q;
}

int main_var(const Poly& a, const Poly& b) {
  int v = -1;
  for (int x : a.variables()) v = std::max(v, x);
  for (int x : b.variables()) v = std::max(v, x);
  return v;
}

Poly gcd_poly(const Poly& a, const Poly& b);

Poly content_in(const Poly& a, int v) {
  Poly g;
  for (const auto& [e, c] : a.coeffs_in(v)) {
    g = gcd_poly(g, c);
    if (g == Poly(1)) break;
  }
  return g;
}

Poly primitive_in(const Poly& a, int v) {
  if (a.is_zero()) return a;
  return *divide_poly(a, content_in(a, v));
}

Poly lead_in(const Poly& a, int v) { return a.coeffs_in(v).rbegin()->second; }

// Pseudo-remainder of a by b with respect to v.
Poly prem(Poly a, const Poly& b, int v) {
  const int db = b.degree_in(v);
  const Poly lb = lead_in(b, v);
  while (!a.is_zero() && a.degree_in(v) >= db) {
    const int da = a.degree_in(v);
    const Poly la = lead_in(a, v);
    a = a * lb - la * Poly::var(v, da - db) * b;
  }
  return a;
}

// Primitive-PRS gcd; the slow but always applicable fallback.
Poly gcd_prs(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(1);
  const int v = main_var(a, b);
  if (!a.has_var(v)) return gcd_poly(a, content_in(b, v));
  if (!b.has_var(v)) return gcd_poly(content_in(a, v), b);
  const Poly c = gcd_poly(content_in(a, v), content_in(b, v));
  Poly x = primitive_in(a, v);
  Poly y = primitive_in(b, v);
  if (x.degree_in(v) < y.degree_in(v)) std::swap(x, y);
  while (!y.is_zero() && y.has_var(v)) {
    Poly r = prem(x, y, v);
    x = std::move(y);
    y = r.is_zero() ? r : primitive_in(r, v).monic();
  }
  // y nonzero and free of v means the primitive parts are coprime.
  if (!y.is_zero()) return c.monic();
  return (c * primitive_in(x, v)).monic();
}

// Heuristic gcd by evaluation at a large integer and xi-adic reconstruction
// (Char, Geddes, Gonnet). Inputs have integer coefficients; the result is
// certified by trial division, so failure only means falling back.

Integer int_content(const Poly& p) {
  Integer g = 0;
  for (const auto& [m, c] : p.terms()) g = gcd(g, numer(c));
  return g;
}

Integer max_norm(const Poly& p) {
  Integer n = 0;
  for (const auto& [m, c] : p.terms()) n = std::max(n, Integer(abs(numer(c))));
  return n;
}

Poly eval_at(const Poly& p, int v, const Integer& xi) {
  Poly out;
  for (const auto& [e, c] : p.coeffs_in(v)) out += c.scaled(Rational(ipow(xi, static_cast<unsigned>(e))));
  return out;
}

Integer mod_sym(const Integer& c, const Integer& xi) {
  Integer r = c % xi;
  if (r < 0) r += xi;
  if (2 * r > xi) r -= xi;
  return r;
}

Poly interpolate(Poly gamma, int v, const Integer& xi) {
  Poly out;
  for (int i = 0; !gamma.is_zero(); ++i) {
    Poly g;
    for (const auto& [m, c] : gamma.terms()) {
      const Integer r = mod_sym(numer(c), xi);
      if (r != 0) g += Poly::term(Rational(r), m);
    }
    out += g * Poly::var(v, i);
    gamma = (gamma - g).scaled(Rational(Integer(1), xi));
  }
  return out;
}

std::optional<Poly> gcd_heu(const Poly& a0, const Poly& b0) {
  if (a0.is_constant() && b0.is_constant()) {
    return Poly(Rational(gcd(numer(a0.constant_term()), numer(b0.constant_term()))));
  }
  const Integer ca = int_content(a0);
  const Integer cb = int_content(b0);
  const Integer g0 = gcd(ca, cb);
  const Poly a = a0.scaled(Rational(Integer(1), ca));
  const Poly b = b0.scaled(Rational(Integer(1), cb));
  const int v = main_var(a, b);
  Integer xi = 2 * std::min(max_norm(a), max_norm(b)) + 29;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const Poly ea = eval_at(a, v, xi);
    const Poly eb = eval_at(b, v, xi);
    if (!ea.is_zero() && !eb.is_zero()) {
      auto gamma = gcd_heu(ea, eb);
      if (!gamma) return std::nullopt;
      Poly g = interpolate(*gamma, v, xi);
      if (!g.is_zero()) {
        g = g.scaled(Rational(Integer(1), int_content(g)));
        if (divide_poly(a, g) && divide_poly(b, g)) return g.scaled(Rational(g0));
      }
    }
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

Poly integer_primitive(const Poly& p) {
  Integer l = 1;
  for (const auto& [m, c] : p.terms()) l = lcm(l, denom(c));
  Poly q = p.scaled(Rational(l));
  return q.scaled(Rational(Integer(1), int_content(q)));
}

// gcd of polynomials without monomial factors; result monic.
Poly gcd_poly(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (auto g = gcd_heu(integer_primitive(a), integer_primitive(b))) return g->monic();
  return gcd_prs(a, b);
}

}  // namespace

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw DomainError("division by zero polynomial");
  if (a.is_zero()) return Poly{};
  const Monomial ma = a.monomial_content();
  const Monomial mb = b.monomial_content();
  auto q = divide_poly(a.strip_monomial(), b.strip_monomial());
  if (!q) return std::nullopt;
  return q->times_monomial(mono_mul(ma, mono_inv(mb)));
}

Poly gcd(const Poly& a, const Poly& b) { return gcd_poly(a.strip_monomial(), b.strip_monomial()); }

// ---------------------------------------------------------------- RatFunc

RatFunc::RatFunc(long long c) : num_(c) {}
RatFunc::RatFunc(const Rational& c) : num_(c) {}
RatFunc::RatFunc(const Poly& p) : num_(p) {}

RatFunc::RatFunc(const Poly& num, const Poly& den) : num_(num), den_(den) {
  if (den.is_zero()) throw DomainError("rational function with zero denominator");
  normalize();
}

void RatFunc::normalize() {
  if (num_.is_zero()) {
    den_ = Poly(1);
    return;
  }
  const Monomial md = den_.monomial_content();
  num_ = num_.times_monomial(mono_inv(md));
  den_ = den_.times_monomial(mono_inv(md));
  if (!den_.is_constant()) {
    const Poly g = gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = *divide_exact(num_, g);
      den_ = *divide_exact(den_, g);
      // The quotient by g can reintroduce monomial content only in num.
      const Monomial m2 = den_.monomial_content();
      num_ = num_.times_monomial(mono_inv(m2));
      den_ = den_.times_monomial(mono_inv(m2));
    }
  }
  const Rational lc = den_.leading_coeff();
  num_ = num_.scaled(1 / lc);
  den_ = den_.scaled(1 / lc);
}

std::vector<int> RatFunc::variables() const {
  std::set<int> vs;
  for (int v : num_.variables()) vs.insert(v);
  for (int v : den_.variables()) vs.insert(v);
  return {vs.begin(), vs.end()};
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
  if (den_ == o.den_) return RatFunc(num_ + o.num_, den_);
  const Poly g = gcd(den_, o.den_);
  const Poly a = *divide_exact(den_, g);
  const Poly b = *divide_exact(o.den_, g);
  return RatFunc(num_ * b + o.num_ * a, a * o.den_);
}

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator*(const RatFunc& o) const {
  if (is_zero() || o.is_zero()) return {};
  const Poly g1 = gcd(num_, o.den_);
  const Poly g2 = gcd(o.num_, den_);
  return RatFunc(*divide_exact(num_, g1) * *divide_exact(o.num_, g2),
                 *divide_exact(den_, g2) * *divide_exact(o.den_, g1));
}

RatFunc RatFunc::inverse() const {
  if (is_zero()) throw DomainError("inverse of zero rational function");
  return RatFunc(den_, num_);
}

RatFunc RatFunc::operator/(const RatFunc& o) const { return *this * o.inverse(); }

RatFunc RatFunc::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  RatFunc r;
  r.num_ = num_.pow(static_cast<unsigned>(e));
  r.den_ = den_.pow(static_cast<unsigned>(e));
  return r;
}

RatFunc RatFunc::derivative(int v) const {
  return RatFunc(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
}

namespace {

RatFunc substitute_poly(const Poly& p, int v, const RatFunc& q) {
  auto parts = p.coeffs_in(v);
  if (parts.size() == 1 && parts.begin()->first == 0) return RatFunc(p);
  if (q.is_zero() && parts.begin()->first < 0) throw DomainError("substituting zero into a negative power");
  const int lo = parts.begin()->first;
  const int hi = parts.rbegin()->first;
  const Poly& a = q.num();
  const Poly& b = q.den();
  Poly sum;
  for (const auto& [e, c] : parts) {
    sum += c * a.pow(static_cast<unsigned>(e - lo)) * b.pow(static_cast<unsigned>(hi - e));
  }
  return RatFunc(sum) * RatFunc(a).pow(lo) * RatFunc(b).pow(-hi);
}

}  // namespace

RatFunc RatFunc::substitute(int v, const RatFunc& q) const {
  return substitute_poly(num_, v, q) / substitute_poly(den_, v, q);
}

RatFunc RatFunc::substitute(const std::map<int, RatFunc>& sub) const {
  constexpr int kFresh = 1 << 29;
  RatFunc r = *this;
  for (const auto& [v, q] : sub) {
    if (r.has_var(v)) r = r.substitute(v, RatFunc(Poly::var(kFresh + v)));
  }
  for (const auto& [v, q] : sub) r = r.substitute(kFresh + v, q);
  return r;
}

std::string RatFunc::to_string(const VarNamer& name) const {
  if (is_poly()) return num_.to_string(name);
  return "(" + num_.to_string(name) + ") / (" + den_.to_string(name) + ")";
}

RatFunc determinant(const std::vector<std::vector<RatFunc>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return RatFunc(1);
  if (n == 1) return m[0][0];
  RatFunc det;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<RatFunc>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<RatFunc> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(m[i][k]);
      }
      minor.push_back(std::move(row));
    }
    RatFunc term = m[0][j] * determinant(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

}  // namespace motivic
