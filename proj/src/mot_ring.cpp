#include "motivic/mot_ring.hpp"

#include "motivic/errors.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

namespace motivic {

// ---------------------------------------------------------------- IntPoly

IntPoly::IntPoly(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

IntPoly IntPoly::constant(const Integer& c) { return IntPoly(std::vector<Integer>{c}); }

IntPoly IntPoly::monomial(const Integer& c, int degree) {
  std::vector<Integer> v(static_cast<std::size_t>(degree) + 1, Integer(0));
  v.back() = c;
  return IntPoly(std::move(v));
}

void IntPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Integer IntPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return 0;
  return coeffs_[static_cast<std::size_t>(i)];
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
  std::vector<Integer> v(std::max(coeffs_.size(), o.coeffs_.size()), Integer(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) v[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) v[i] += o.coeffs_[i];
  return IntPoly(std::move(v));
}

IntPoly IntPoly::operator-() const {
  std::vector<Integer> v = coeffs_;
  for (auto& c : v) c = -c;
  return IntPoly(std::move(v));
}

IntPoly IntPoly::operator-(const IntPoly& o) const { return *this + (-o); }

IntPoly IntPoly::operator*(const IntPoly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Integer> v(coeffs_.size() + o.coeffs_.size() - 1, Integer(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  return IntPoly(std::move(v));
}

std::optional<IntPoly> IntPoly::divide_exact(const IntPoly& monic) const {
  if (monic.is_zero() || monic.leading() != 1) throw DomainError("divide_exact needs a monic divisor");
  if (is_zero()) return IntPoly{};
  if (degree() < monic.degree()) return std::nullopt;
  std::vector<Integer> rem = coeffs_;
  const int dq = degree() - monic.degree();
  std::vector<Integer> quot(static_cast<std::size_t>(dq) + 1, Integer(0));
  for (int k = dq; k >= 0; --k) {
    const Integer c = rem[static_cast<std::size_t>(k + monic.degree())];
    quot[static_cast<std::size_t>(k)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= monic.degree(); ++j) {
      rem[static_cast<std::size_t>(k + j)] -= c * monic.coeffs_[static_cast<std::size_t>(j)];
    }
  }
  for (const auto& r : rem) {
    if (r != 0) return std::nullopt;
  }
  return IntPoly(std::move(quot));
}

IntPoly IntPoly::shifted(int k) const {
  if (is_zero() || k == 0) return *this;
  std::vector<Integer> v(static_cast<std::size_t>(k), Integer(0));
  v.insert(v.end(), coeffs_.begin(), coeffs_.end());
  return IntPoly(std::move(v));
}

Rational IntPoly::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + Rational(*it);
  return acc;
}

const IntPoly& cyclotomic(int n) {
  static std::mutex mu;
  static std::map<int, IntPoly> cache;
  if (n < 1) throw DomainError("cyclotomic index must be positive");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // L^n - 1 divided by Phi_d for every proper divisor d; computed bottom-up.
  std::vector<int> todo;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0 && !cache.count(d)) todo.push_back(d);
  }
  for (int d : todo) {
    IntPoly p = IntPoly::monomial(1, d) - IntPoly::constant(1);
    for (int e = 1; e < d; ++e) {
      if (d % e == 0) p = *p.divide_exact(cache.at(e));
    }
    cache.emplace(d, std::move(p));
  }
  return cache.at(n);
}

// -------------------------------------------------------- TruncatedSeries

TruncatedSeries TruncatedSeries::truncate(int new_cutoff) const {
  TruncatedSeries out;
  out.cutoff = std::max(cutoff, new_cutoff);
  for (const auto& [k, c] : terms) {
    if (k > out.cutoff) out.terms.emplace(k, c);
  }
  return out;
}

std::string TruncatedSeries::to_string() const {
  if (terms.empty()) return "0 + F_" + std::to_string(cutoff);
  std::ostringstream os;
  bool first = true;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    Integer c = it->second;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (c < 0) c = -c;
    if (c != 1) os << c << "*";
    os << "L^" << it->first;
    first = false;
  }
  os << " + F_" << cutoff;
  return os.str();
}

// --------------------------------------------------------------- MotClass

MotClass::MotClass(long long n) : num_(IntPoly::constant(Integer(n))) { normalize(); }

MotClass MotClass::L() { return L_pow(1); }

MotClass MotClass::L_pow(int k) {
  MotClass x;
  x.num_ = IntPoly::constant(1);
  x.l_shift_ = -k;
  return x;
}

MotClass MotClass::inverse_cyclo(int b) {
  if (b < 1) throw DomainError("inverse_cyclo needs b >= 1");
  MotClass x;
  x.num_ = IntPoly::constant(1);
  for (int d = 1; d <= b; ++d) {
    if (b % d == 0) x.phi_exp_[d] += 1;
  }
  return x;
}

MotClass MotClass::from_poly(const IntPoly& p, int l_shift) {
  MotClass x;
  x.num_ = p;
  x.l_shift_ = l_shift;
  x.normalize();
  return x;
}

void MotClass::normalize() {
  if (num_.is_zero()) {
    l_shift_ = 0;
    phi_exp_.clear();
    return;
  }
  int low = 0;
  while (num_.coeff(low) == 0) ++low;
  if (low > 0) {
    std::vector<Integer> v(num_.coeffs().begin() + low, num_.coeffs().end());
    num_ = IntPoly(std::move(v));
    l_shift_ -= low;
  }
  for (auto it = phi_exp_.begin(); it != phi_exp_.end();) {
    const IntPoly& phi = cyclotomic(it->first);
    while (it->second > 0) {
      auto q = num_.divide_exact(phi);
      if (!q) break;
      num_ = std::move(*q);
      --it->second;
    }
    it = (it->second == 0) ? phi_exp_.erase(it) : std::next(it);
  }
}

MotClass MotClass::operator+(const MotClass& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  // Common denominator: L^max(a) * prod Phi_n^max(e_n).
  const int a = std::max(l_shift_, o.l_shift_);
  std::map<int, int> exps = phi_exp_;
  for (const auto& [n, e] : o.phi_exp_) exps[n] = std::max(exps[n], e);
  auto lift = [&](const MotClass& x) {
    IntPoly p = x.num_.shifted(a - x.l_shift_);
    for (const auto& [n, e] : exps) {
      auto it = x.phi_exp_.find(n);
      const int have = (it == x.phi_exp_.end()) ? 0 : it->second;
      for (int k = have; k < e; ++k) p = p * cyclotomic(n);
    }
    return p;
  };
  MotClass r;
  r.num_ = lift(*this) + lift(o);
  r.l_shift_ = a;
  r.phi_exp_ = std::move(exps);
  r.normalize();
  return r;
}

MotClass MotClass::operator-() const {
  MotClass r = *this;
  r.num_ = -r.num_;
  return r;
}

MotClass MotClass::operator-(const MotClass& o) const { return *this + (-o); }

MotClass MotClass::operator*(const MotClass& o) const {
  if (is_zero() || o.is_zero()) return {};
  MotClass r;
  r.num_ = num_ * o.num_;
  r.l_shift_ = l_shift_ + o.l_shift_;
  r.phi_exp_ = phi_exp_;
  for (const auto& [n, e] : o.phi_exp_) r.phi_exp_[n] += e;
  r.normalize();
  return r;
}

MotClass MotClass::inverse() const {
  if (is_zero()) throw DomainError("inverse of zero");
  IntPoly p = num_;
  std::map<int, int> found;
  for (int n = 1; p.degree() > 0; ++n) {
    const IntPoly& phi = cyclotomic(n);
    if (phi.degree() > p.degree()) {
      // Euler phi(n) >= sqrt(n/2); once n is this large nothing else can divide.
      if (static_cast<long long>(n) > 2LL * p.degree() * p.degree() + 2) break;
      continue;
    }
    while (auto q = p.divide_exact(phi)) {
      p = std::move(*q);
      ++found[n];
    }
  }
  if (p.degree() != 0 || (p.coeff(0) != 1 && p.coeff(0) != -1)) {
    throw DomainError("element " + to_string() + " is not invertible in the value ring");
  }
  MotClass r;
  r.num_ = IntPoly::constant(p.coeff(0));
  for (const auto& [n, e] : phi_exp_) {
    for (int k = 0; k < e; ++k) r.num_ = r.num_ * cyclotomic(n);
  }
  r.l_shift_ = -l_shift_;
  r.phi_exp_ = std::move(found);
  r.normalize();
  return r;
}

std::optional<int> MotClass::vdim() const {
  if (is_zero()) return std::nullopt;
  int deg = num_.degree() - l_shift_;
  for (const auto& [n, e] : phi_exp_) deg -= e * cyclotomic(n).degree();
  return deg;
}

TruncatedSeries MotClass::expand(int cutoff) const {
  TruncatedSeries out;
  out.cutoff = cutoff;
  if (is_zero()) return out;
  IntPoly den = IntPoly::constant(1);
  for (const auto& [n, e] : phi_exp_) {
    for (int k = 0; k < e; ++k) den = den * cyclotomic(n);
  }
  const int delta = den.degree();
  // 1/D(L) = L^-delta / Drev(L^-1) with Drev(0) = 1, a power series in L^-1.
  const int terms_needed = num_.degree() - l_shift_ - delta - cutoff;
  if (terms_needed <= 0) return out;
  std::vector<Integer> series(static_cast<std::size_t>(terms_needed), Integer(0));
  series[0] = 1;
  for (int k = 1; k < terms_needed; ++k) {
    Integer acc = 0;
    for (int i = 1; i <= std::min(k, delta); ++i) {
      acc -= den.coeff(delta - i) * series[static_cast<std::size_t>(k - i)];
    }
    series[static_cast<std::size_t>(k)] = acc;
  }
  for (int i = 0; i <= num_.degree(); ++i) {
    const Integer& p = num_.coeffs()[static_cast<std::size_t>(i)];
    if (p == 0) continue;
    for (int k = 0; k < terms_needed; ++k) {
      const int exponent = i - l_shift_ - delta - k;
      if (exponent <= cutoff) break;
      out.terms[exponent] += p * series[static_cast<std::size_t>(k)];
    }
  }
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    it = (it->second == 0) ? out.terms.erase(it) : std::next(it);
  }
  return out;
}

Rational MotClass::specialize(long long q) const {
  if (q < 2) throw DomainError("specialize needs q >= 2");
  const Rational qq(q);
  Rational value = num_.evaluate(qq) * rpow(qq, -l_shift_);
  for (const auto& [n, e] : phi_exp_) value /= rpow(cyclotomic(n).evaluate(qq), e);
  return value;
}

Rational MotClass::norm() const {
  auto d = vdim();
  if (!d) return 0;
  return rpow(Rational(2), *d);
}

std::vector<std::pair<int, int>> MotClass::cyclo_factors() const {
  std::map<int, int> remaining = phi_exp_;
  std::map<int, int> out;
  while (!remaining.empty()) {
    const int b = remaining.rbegin()->first;
    for (int d = 1; d <= b; ++d) {
      if (b % d != 0) continue;
      auto it = remaining.find(d);
      if (it != remaining.end() && --it->second == 0) remaining.erase(it);
    }
    ++out[b];
  }
  return {out.rbegin(), out.rend()};
}

namespace {

// Renders sum c_i L^(i + offset) with descending exponents.
std::string render_laurent(const IntPoly& p, int offset) {
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    Integer c = p.coeff(i);
    if (c == 0) continue;
    const int e = i + offset;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (c < 0) c = -c;
    if (e == 0) {
      os << c;
    } else {
      if (c != 1) os << c << "*";
      os << "L";
      if (e != 1) os << "^" << e;
    }
    first = false;
  }
  return first ? "0" : os.str();
}

}  // namespace

std::string MotClass::to_string() const {
  if (is_zero()) return "0";
  auto factors = cyclo_factors();
  // Numerator compensation for the Phi_d picked up by the greedy (L^b - 1) cover.
  std::map<int, int> covered;
  for (const auto& [b, m] : factors) {
    for (int d = 1; d <= b; ++d) {
      if (b % d == 0) covered[d] += m;
    }
  }
  IntPoly top = num_;
  for (const auto& [d, c] : covered) {
    auto it = phi_exp_.find(d);
    const int need = (it == phi_exp_.end()) ? 0 : it->second;
    for (int k = need; k < c; ++k) top = top * cyclotomic(d);
  }
  const std::string numerator = render_laurent(top, -l_shift_);
  if (factors.empty()) return numerator;
  std::ostringstream os;
  const bool single_term =
      std::count_if(top.coeffs().begin(), top.coeffs().end(), [](const Integer& c) { return c != 0; }) == 1;
  std::ostringstream den;
  bool first = true;
  for (const auto& [b, m] : factors) {
    if (!first) den << " * ";
    den << "(L" << (b == 1 ? "" : "^" + std::to_string(b)) << " - 1)";
    if (m != 1) den << "^" << m;
    first = false;
  }
  const bool bare = factors.size() == 1 && factors.front().second == 1;
  os << (single_term ? numerator : "(" + numerator + ")") << " / "
     << (bare ? den.str() : "(" + den.str() + ")");
  return os.str();
}

std::string to_string(const MotClass& x) { return x.to_string(); }

MotClass geometric_sum(const MotClass& c, int k, int n0) {
  if (k <= 0) {
    throw DivergenceError("geometric ratio L^" + std::to_string(-k) +
                          " does not have negative virtual dimension");
  }
  if (c.is_zero()) return {};
  return c * MotClass::L_pow(-k * (n0 - 1)) * MotClass::inverse_cyclo(k);
}

// ----------------------------------------------------------------- parser

namespace {

class MotParser {
 public:
  explicit MotParser(const std::string& text) : s_(text) {}

  MotClass run() {
    MotClass v = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("MotClass parse error at " + std::to_string(pos_) + ": " + what + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  long long integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::stoll(s_.substr(start, pos_ - start));
  }
  MotClass expr() {
    MotClass v = term();
    for (;;) {
      if (eat('+')) {
        v = v + term();
      } else if (eat('-')) {
        v = v - term();
      } else {
        return v;
      }
    }
  }
  MotClass term() {
    MotClass v = power();
    for (;;) {
      if (eat('*')) {
        v = v * power();
      } else if (eat('/')) {
        v = v * power().inverse();
      } else {
        return v;
      }
    }
  }
  MotClass power() {
    if (eat('-')) return -power();
    MotClass base = primary();
    if (eat('^')) {
      bool neg = false;
      if (eat('-')) neg = true;
      const long long e = integer();
      MotClass r = 1;
      for (long long i = 0; i < e; ++i) r = r * base;
      return neg ? r.inverse() : r;
    }
    return base;
  }
  MotClass primary() {
    skip();
    if (eat('(')) {
      MotClass v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (eat('L')) return MotClass::L();
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      MotClass r;
      return MotClass::from_poly(IntPoly::constant(Integer(s_.substr(start, pos_ - start))));
    }
    fail("unexpected character");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

MotClass MotClass::parse(const std::string& text) { return MotParser(text).run(); }

}  // namespace motivic
