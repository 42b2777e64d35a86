#include "motivic/biggroup.hpp"

#include "motivic/errors.hpp"
#include "motivic/oracle.hpp"
#include "motivic/slot_series.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <set>

namespace motivic {

// ------------------------------------------------------------------ groups

int GroupSpec::n() const { return kind == GroupKind::SL2 ? 1 : 0; }

int GroupSpec::m() const {
  switch (kind) {
    case GroupKind::SL2:
      return 1;
    case GroupKind::Torus:
      return rank;
    case GroupKind::Additive:
      return 0;
  }
  return 0;
}

int GroupSpec::dim() const { return kind == GroupKind::Additive ? rank : 2 * n() + m(); }

std::string GroupSpec::to_string() const {
  switch (kind) {
    case GroupKind::SL2:
      return "SL2";
    case GroupKind::Additive:
      return "Ga^" + std::to_string(rank);
    case GroupKind::Torus:
      return "Gm^" + std::to_string(rank);
  }
  return "?";
}

GroupSpec GroupSpec::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') s += static_cast<char>(std::tolower(c));
  }
  if (s == "sl2") return sl2();
  auto power = [&](const std::string& head) -> std::optional<int> {
    if (s.rfind(head, 0) != 0) return std::nullopt;
    std::string rest = s.substr(head.size());
    if (rest.empty()) return 1;
    if (rest[0] != '^') return std::nullopt;
    try {
      const int k = std::stoi(rest.substr(1));
      if (k >= 1) return k;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  };
  if (auto k = power("ga")) return additive(*k);
  if (auto k = power("gm")) return torus(*k);
  throw ParseError("unknown group '" + text + "'; expected SL2, Ga^d or Gm^m");
}

GroupElement GroupElement::identity(const GroupSpec& g) {
  GroupElement e{g, {}};
  switch (g.kind) {
    case GroupKind::SL2:
      e.entries = {RatFunc(1), RatFunc(), RatFunc(), RatFunc(1)};
      break;
    case GroupKind::Additive:
      e.entries.assign(static_cast<std::size_t>(g.rank), RatFunc());
      break;
    case GroupKind::Torus:
      e.entries.assign(static_cast<std::size_t>(g.rank), RatFunc(1));
      break;
  }
  return e;
}

GroupElement GroupElement::sl2(const RatFunc& a, const RatFunc& b, const RatFunc& c, const RatFunc& d) {
  if (a * d - b * c != RatFunc(1)) throw DomainError("matrix does not have determinant 1");
  return GroupElement{GroupSpec::sl2(), {a, b, c, d}};
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  if (group.kind != o.group.kind || entries.size() != o.entries.size()) throw DomainError("group mismatch");
  GroupElement r{group, {}};
  const auto& x = entries;
  const auto& y = o.entries;
  switch (group.kind) {
    case GroupKind::SL2:
      r.entries = {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
                   x[2] * y[1] + x[3] * y[3]};
      break;
    case GroupKind::Additive:
      for (std::size_t i = 0; i < x.size(); ++i) r.entries.push_back(x[i] + y[i]);
      break;
    case GroupKind::Torus:
      for (std::size_t i = 0; i < x.size(); ++i) r.entries.push_back(x[i] * y[i]);
      break;
  }
  return r;
}

GroupElement GroupElement::inverse() const {
  GroupElement r{group, {}};
  switch (group.kind) {
    case GroupKind::SL2:
      r.entries = {entries[3], -entries[1], -entries[2], entries[0]};
      break;
    case GroupKind::Additive:
      for (const auto& e : entries) r.entries.push_back(-e);
      break;
    case GroupKind::Torus:
      for (const auto& e : entries) r.entries.push_back(e.inverse());
      break;
  }
  return r;
}

std::string GroupElement::to_string() const {
  auto show = [](const RatFunc& f) { return f.to_string(coord_name); };
  if (group.kind == GroupKind::SL2) {
    return "[[" + show(entries[0]) + ", " + show(entries[1]) + "], [" + show(entries[2]) + ", " + show(entries[3]) +
           "]]";
  }
  std::string out = "[";
  for (std::size_t i = 0; i < entries.size(); ++i) out += (i ? ", " : "") + show(entries[i]);
  return out + "]";
}

// ----------------------------------------------------------------- parsing

namespace {

class TExpression {
 public:
  explicit TExpression(std::string text) : s_(std::move(text)) {}

  RatFunc run() {
    RatFunc v = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("t-expression: " + what + " at " + std::to_string(i_) + " in '" + s_ + "'");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool accept(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  long long integer() {
    skip();
    bool neg = accept('-');
    skip();
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) fail("expected integer");
    long long v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) v = 10 * v + (s_[i_++] - '0');
    return neg ? -v : v;
  }
  RatFunc expr() {
    RatFunc v = term();
    for (;;) {
      if (accept('+')) {
        v = v + term();
      } else if (accept('-')) {
        v = v - term();
      } else {
        return v;
      }
    }
  }
  RatFunc term() {
    RatFunc v = factor();
    for (;;) {
      if (accept('*')) {
        v = v * factor();
      } else if (accept('/')) {
        const RatFunc d = factor();
        if (d.is_zero()) fail("division by zero");
        v = v / d;
      } else {
        return v;
      }
    }
  }
  RatFunc factor() {
    if (accept('-')) return -factor();
    RatFunc base = primary();
    if (accept('^')) {
      const long long e = integer();
      if (base.is_zero() && e < 0) fail("zero to a negative power");
      base = base.pow(static_cast<int>(e));
    }
    return base;
  }
  RatFunc primary() {
    skip();
    if (accept('(')) {
      RatFunc v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (i_ < s_.size() && s_[i_] == 't') {
      ++i_;
      return RatFunc(Poly::var(0));
    }
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      Integer v = 0;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) v = 10 * v + (s_[i_++] - '0');
      return RatFunc(Rational(v));
    }
    fail("expected number, t or '('");
  }

  std::string s_;
  std::size_t i_ = 0;
};

// Splits "[a, b, ...]" into its top-level items.
std::vector<std::string> bracket_items(const std::string& text) {
  std::string s = text;
  const auto b = s.find_first_not_of(" \t\n");
  const auto e = s.find_last_not_of(" \t\n");
  if (b == std::string::npos || s[b] != '[' || s[e] != ']') throw ParseError("expected a bracketed list: '" + text + "'");
  s = s.substr(b + 1, e - b - 1);
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool is_star(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b != std::string::npos && b == e && s[b] == '*';
}

}  // namespace

RatFunc parse_t_expression(const std::string& text) { return TExpression(text).run(); }

GroupElement parse_element(const std::string& text, const GroupSpec& g) {
  if (g.kind != GroupKind::SL2) {
    const auto items = bracket_items(text);
    if (static_cast<int>(items.size()) != g.rank) throw ParseError("expected " + std::to_string(g.rank) + " entries");
    GroupElement e{g, {}};
    for (const auto& it : items) {
      e.entries.push_back(parse_t_expression(it));
      if (g.kind == GroupKind::Torus && e.entries.back().is_zero()) throw DomainError("torus entries must be nonzero");
    }
    return e;
  }
  const auto rows = bracket_items(text);
  if (rows.size() != 2) throw ParseError("SL2 literal needs two rows");
  std::vector<std::string> cells;
  for (const auto& r : rows) {
    const auto items = bracket_items(r);
    if (items.size() != 2) throw ParseError("SL2 literal rows need two entries");
    cells.insert(cells.end(), items.begin(), items.end());
  }
  const auto star = std::count_if(cells.begin(), cells.end(), is_star);
  if (star > 1) throw ParseError("at most one entry may be '*'");
  std::array<RatFunc, 4> v;
  int hole = -1;
  for (int k = 0; k < 4; ++k) {
    if (is_star(cells[static_cast<std::size_t>(k)])) {
      hole = k;
    } else {
      v[static_cast<std::size_t>(k)] = parse_t_expression(cells[static_cast<std::size_t>(k)]);
    }
  }
  // a d - b c = 1 solved for the hole.
  auto solve = [](const RatFunc& partner, const RatFunc& rest) {
    if (partner.is_zero()) throw DomainError("'*' cannot be solved: its cofactor vanishes");
    return rest / partner;
  };
  switch (hole) {
    case 0:
      v[0] = solve(v[3], RatFunc(1) + v[1] * v[2]);
      break;
    case 3:
      v[3] = solve(v[0], RatFunc(1) + v[1] * v[2]);
      break;
    case 1:
      v[1] = solve(-v[2], RatFunc(1) - v[0] * v[3]);
      break;
    case 2:
      v[2] = solve(-v[1], RatFunc(1) - v[0] * v[3]);
      break;
    default:
      break;
  }
  return GroupElement::sl2(v[0], v[1], v[2], v[3]);
}

// ------------------------------------------------------------------ charts

namespace {

RatFunc cv(int i) { return RatFunc(Poly::var(coord_var(i))); }

std::vector<RatFunc> reference_embed(const std::vector<RatFunc>& g) {
  if (g[0].is_zero()) throw NotInBigCellError("upper-left entry vanishes");
  return {g[0] * g[1], g[2] / g[0], g[0]};
}

std::vector<RatFunc> reference_extract(const RatFunc& x, const RatFunc& y, const RatFunc& s) {
  return {s, x / s, y * s, (RatFunc(1) + x * y) / s};
}

void require_sl2(const GroupSpec& g, const char* what) {
  if (g.kind != GroupKind::SL2) throw DomainError(std::string(what) + " charts are defined for SL2 only");
}

}  // namespace

BigCellChart BigCellChart::reference(const GroupSpec& g) { return {g, ChartKind::Reference, GroupElement::identity(g)}; }

BigCellChart BigCellChart::swapped(const GroupSpec& g) {
  require_sl2(g, "swapped");
  return {g, ChartKind::Swapped, GroupElement::identity(g)};
}

BigCellChart BigCellChart::conjugated(const GroupElement& c) {
  require_sl2(c.group, "conjugated");
  return {c.group, ChartKind::Conjugated, c};
}

std::vector<RatFunc> BigCellChart::embed(const GroupElement& g) const {
  if (group.kind != GroupKind::SL2) return g.entries;
  switch (kind) {
    case ChartKind::Reference:
      return reference_embed(g.entries);
    case ChartKind::Swapped: {
      auto u = reference_embed(g.entries);
      return {u[1], u[0], u[2].inverse()};
    }
    case ChartKind::Conjugated:
      return reference_embed((conj.inverse() * g * conj).entries);
  }
  return {};
}

GroupElement BigCellChart::extract() const {
  GroupElement e{group, {}};
  if (group.kind != GroupKind::SL2) {
    for (int i = 0; i < group.rank; ++i) e.entries.push_back(cv(i));
    return e;
  }
  switch (kind) {
    case ChartKind::Reference:
      e.entries = reference_extract(cv(0), cv(1), cv(2));
      break;
    case ChartKind::Swapped:
      e.entries = reference_extract(cv(1), cv(0), cv(2).inverse());
      break;
    case ChartKind::Conjugated: {
      GroupElement base{group, reference_extract(cv(0), cv(1), cv(2))};
      e = conj * base * conj.inverse();
      break;
    }
  }
  return e;
}

RatFunc BigCellChart::weight_p() const {
  switch (group.kind) {
    case GroupKind::Additive:
      return RatFunc(1);
    case GroupKind::Torus: {
      RatFunc p(1);
      for (int i = 0; i < group.rank; ++i) p = p / cv(i);
      return p;
    }
    case GroupKind::SL2:
      return cv(2).inverse();
  }
  return RatFunc(1);
}

WeightSpec BigCellChart::weight() const {
  WeightSpec w;
  switch (group.kind) {
    case GroupKind::Additive:
      break;
    case GroupKind::Torus:
      for (int i = 0; i < group.rank; ++i) w.factors.push_back({Poly::var(coord_var(i)), -1});
      break;
    case GroupKind::SL2:
      w.factors.push_back({Poly::var(coord_var(2)), -1});
      break;
  }
  return w;
}

std::string BigCellChart::to_string() const {
  switch (kind) {
    case ChartKind::Reference:
      return group.to_string() + " reference chart";
    case ChartKind::Swapped:
      return group.to_string() + " swapped chart";
    case ChartKind::Conjugated:
      return group.to_string() + " chart conjugated by " + conj.to_string();
  }
  return "";
}

namespace {

std::map<int, LaurentScalar> coordinate_assignment(const LaurentVector& u) {
  std::map<int, LaurentScalar> a;
  for (std::size_t i = 0; i < u.size(); ++i) a.emplace(coord_var(static_cast<int>(i)), u[i]);
  return a;
}

}  // namespace

LaurentVector chart_embed(const LaurentMatrix& g, const BigCellChart& chart) {
  require_sl2(chart.group, "matrix");
  const LaurentScalar det = g[0] * g[3] - g[1] * g[2] - LaurentScalar(1);
  if (!det.is_zero_to_precision()) throw DomainError("matrix does not have determinant 1");
  LaurentMatrix h = g;
  if (chart.kind == ChartKind::Conjugated) {
    auto lift = [](const GroupElement& e) {
      LaurentMatrix m;
      for (std::size_t k = 0; k < 4; ++k) m[k] = LaurentScalar::from_ratfunc(e.entries[k]);
      return m;
    };
    auto mul = [](const LaurentMatrix& x, const LaurentMatrix& y) {
      return LaurentMatrix{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
                           x[2] * y[1] + x[3] * y[3]};
    };
    h = mul(mul(lift(chart.conj.inverse()), g), lift(chart.conj));
  }
  if (h[0].is_known_zero()) throw NotInBigCellError("upper-left entry vanishes");
  if (h[0].is_zero_to_precision()) throw IndeterminateError("upper-left entry is zero to the working precision");
  const LaurentScalar inv_a = h[0].inv();
  LaurentVector u;
  u.entries = {h[0] * h[1], h[2] * inv_a, h[0]};
  if (chart.kind == ChartKind::Swapped) u.entries = {u[1], u[0], inv_a};
  return u;
}

LaurentMatrix chart_extract(const LaurentVector& u, const BigCellChart& chart) {
  require_sl2(chart.group, "matrix");
  const GroupElement e = chart.extract();
  const auto a = coordinate_assignment(u);
  LaurentMatrix m;
  for (std::size_t k = 0; k < 4; ++k) m[k] = ratfunc_eval(e.entries[k], a);
  return m;
}

// ------------------------------------------------------------ rational maps

namespace {

Poly lcm(const Poly& a, const Poly& b) {
  const Poly g = gcd(a, b);
  return *divide_exact(a * b, g);
}

}  // namespace

RationalMap RationalMap::from_components(std::vector<RatFunc> components, int shift) {
  RationalMap h;
  h.components = std::move(components);
  h.shift = shift;
  Poly den(1);
  std::map<int, int> clear;  // coordinate var -> exponent moving it out of the numerators
  for (const auto& c : h.components) {
    den = lcm(den, c.den());
    for (int v : c.num().variables()) {
      if (v != 0) clear[v] = std::max(clear[v], -c.num().min_degree_in(v));
    }
  }
  Monomial mu;
  for (const auto& [v, e] : clear) {
    if (e > 0) mu.emplace_back(v, e);
  }
  Poly delta = den.times_monomial(mu);
  std::vector<Poly> nums;
  for (const auto& c : h.components) {
    const RatFunc scaled = c * RatFunc(delta);
    if (!scaled.is_poly()) throw MotivicError("clearing denominators failed for " + c.to_string(coord_name));
    nums.push_back(scaled.num());
  }
  // Remove a common factor, including a common coordinate monomial.
  Poly g = delta.strip_monomial();
  for (const auto& n : nums) g = gcd(g, n);
  Monomial common;
  for (const auto& [v, e] : delta.monomial_content()) {
    if (v == 0) continue;
    int k = e;
    for (const auto& n : nums) k = std::min(k, n.is_zero() ? k : n.min_degree_in(v));
    if (k > 0) common.emplace_back(v, -k);
  }
  if (!g.is_constant()) {
    delta = *divide_exact(delta, g);
    for (auto& n : nums) n = *divide_exact(n, g);
  }
  if (!common.empty()) {
    delta = delta.times_monomial(common);
    for (auto& n : nums) n = n.times_monomial(common);
  }
  h.numerators = std::move(nums);
  h.delta = delta;
  Poly check = delta.strip_monomial();
  for (const auto& n : h.numerators) check = gcd(check, n);
  h.cleared = check.is_constant();
  return h;
}

std::string RationalMap::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < numerators.size(); ++i) out += (i ? ", " : "") + numerators[i].to_string(coord_name);
  return out + ") / (" + delta.to_string(coord_name) + ")";
}

RationalMap translation_map(const GroupElement& g0, const BigCellChart& chart, int shift) {
  if (g0.group.kind != chart.group.kind || g0.group.rank != chart.group.rank) throw DomainError("group mismatch");
  std::vector<RatFunc> comps = chart.embed(g0 * chart.extract());
  if (shift != 0) {
    std::map<int, RatFunc> sub;
    for (int i = 0; i < chart.group.dim(); ++i) sub.emplace(coord_var(i), RatFunc(Poly::var(0, -shift)) * cv(i));
    for (auto& c : comps) c = c.substitute(sub);
  }
  return RationalMap::from_components(std::move(comps), shift);
}

RatFunc jacobian_det(const RationalMap& h) {
  const std::size_t d = h.components.size();
  std::vector<std::vector<RatFunc>> m(d, std::vector<RatFunc>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m[i][j] = h.components[i].derivative(coord_var(static_cast<int>(j)));
  }
  return determinant(m);
}

IdentityReport invariance_identity_check(const GroupElement& g0, const BigCellChart& chart) {
  const RationalMap h = translation_map(g0, chart);
  const RatFunc p = chart.weight_p();
  std::map<int, RatFunc> sub;
  for (std::size_t i = 0; i < h.components.size(); ++i) sub.emplace(coord_var(static_cast<int>(i)), h.components[i]);
  IdentityReport r;
  r.witness = p.substitute(sub) * jacobian_det(h) - p;
  r.ok = r.witness.is_zero();
  return r;
}

// -------------------------------------------------------------- the measure

OmegaSet OmegaSet::arcs_in_big_cell(const GroupSpec& g) {
  std::vector<Condition> parts;
  if (g.kind == GroupKind::SL2) parts.emplace_back(OrdExact{2, 0});
  if (g.kind == GroupKind::Torus) {
    for (int i = 0; i < g.rank; ++i) parts.emplace_back(OrdExact{i, 0});
  }
  return OmegaSet{CylinderSet{g.dim(), 0, Condition::all(std::move(parts))}, ""};
}

MeasureResult haar_measure(const OmegaSet& b, const BigCellChart& chart) {
  if (b.chart_part.dim != chart.group.dim()) throw DomainError("set dimension does not match the chart");
  // The part inside Z((t)) carries no mass.
  return integrate_weighted(chart.weight(), b.chart_part);
}

namespace {

struct AffineComponent {
  int source = -1;
  LaurentScalar a;
  LaurentScalar b;
};

// h_i = a_i + b_i x_sigma(i) with sigma a permutation and a_i, b_i in k(t).
std::optional<std::vector<AffineComponent>> affine_form(const RationalMap& h) {
  std::vector<AffineComponent> out;
  std::set<int> used;
  for (const auto& c : h.components) {
    for (int v : c.den().variables()) {
      if (v != 0) return std::nullopt;
    }
    std::vector<int> coords;
    for (int v : c.num().variables()) {
      if (v != 0) coords.push_back(v);
    }
    if (coords.size() != 1) return std::nullopt;
    const auto parts = c.num().coeffs_in(coords[0]);
    if (!parts.count(1)) return std::nullopt;
    for (const auto& [e, p] : parts) {
      if (e != 0 && e != 1) return std::nullopt;
    }
    AffineComponent a;
    a.source = var_coord(coords[0]);
    if (!used.insert(a.source).second) return std::nullopt;
    a.b = LaurentScalar::from_ratfunc(RatFunc(parts.at(1), c.den()));
    a.a = parts.count(0) ? LaurentScalar::from_ratfunc(RatFunc(parts.at(0), c.den())) : LaurentScalar();
    out.push_back(a);
  }
  return out;
}

MeasureResult affine_preimage(const std::vector<AffineComponent>& f, const CylinderSet& target, const WeightSpec& w) {
  const int na = target.pole_bound;
  int n = 0;
  for (const auto& c : f) {
    const int low_a = c.a.is_known_zero() ? -na : std::min(-na, c.a.ord());
    n = std::max(n, c.b.ord() - low_a);
  }
  std::vector<Condition> parts;
  parts.push_back(substitute_slots(target.condition, na, [&](int i, int j) {
    const auto& c = f[static_cast<std::size_t>(i)];
    return affine_coefficient(c.source, c.a, c.b, j, n);
  }));
  for (const auto& c : f) parts.push_back(ord_affine_at_least(c.source, c.a, c.b, -na, n));
  return integrate_weighted(w, CylinderSet{target.dim, n, Condition::all(std::move(parts))});
}

// Maps with one base coordinate y whose component depends on y alone, all
// other components affine in their own coordinate over k(t)(y), and all
// polynomials in y of degree one. The base line is cut by ord y and, where
// cancellation can happen, by the orders of the linear factors; the fibres
// are order shells of the affine components.
class FibredPreimage {
 public:
  static std::optional<FibredPreimage> make(const RationalMap& h, const CylinderSet& target, const WeightSpec& w) {
    const int d = target.dim;
    std::vector<Interval> bounds(static_cast<std::size_t>(d), Interval{-target.pole_bound, std::nullopt, false});
    std::vector<std::vector<Condition>> own(static_cast<std::size_t>(d));
    std::vector<bool> coefficient(static_cast<std::size_t>(d), false);
    std::vector<Condition> coupled;
    if (!collect_intervals(target.condition, bounds, own, coefficient, coupled)) return std::nullopt;
    std::set<int> coupled_coords;
    for (const auto& c : coupled) coords_in(c, coupled_coords);
    // A fibre coordinate with coefficient conditions contributes L^(ord b) times
    // the volume of its own condition, whatever the translation part.
    std::vector<std::optional<MotClass>> own_volume(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < own.size(); ++i) {
      if (coefficient[i]) own_volume[i] = measure_bounded(CylinderSet{1, target.pole_bound, Condition::all(own[i])});
    }
    std::map<int, int> powers;
    for (const auto& f : w.factors) {
      const auto vars = f.f.variables();
      if (f.f.terms().size() != 1 || vars.size() != 1 || f.f.degree_in(vars[0]) != 1 || vars[0] == 0) {
        return std::nullopt;
      }
      powers[var_coord(vars[0])] += f.power;
    }
    if (w.t_order != 0) return std::nullopt;
    for (int base = 0; base < d; ++base) {
      FibredPreimage f;
      f.base_ = base;
      f.bounds_ = bounds;
      f.own_volume_ = own_volume;
      f.own_ = own;
      f.target_pole_ = target.pole_bound;
      f.coupled_ = Condition::all(coupled);
      f.coupled_coords_ = coupled_coords;
      f.base_power_ = powers.count(base) ? powers[base] : 0;
      if (f.fit(h, powers)) return f;
    }
    return std::nullopt;
  }

  MeasureResult run() {
    std::set<int> critical;
    for (const auto& k : factors_) {
      if (k.critical) critical.insert(*k.critical);
    }
    const int lo = critical.empty() ? 0 : *critical.begin();
    const int hi = critical.empty() ? 0 : *critical.rbegin();
    MeasureResult r;
    for (int v = lo; v <= hi; ++v) r.value += at_order(v);
    StrataPolicy policy;
    policy.check_from = 4;
    policy.window = 3;
    const MeasureResult up = sum_strata([&](int e) { return at_order(hi + 1 + e); }, 0, nullptr, policy, "ord(y)");
    const MeasureResult down = sum_strata([&](int e) { return at_order(lo - 1 - e); }, 0, nullptr, policy, "-ord(y)");
    r.value += up.value + down.value;
    r.decomposition.push_back({"ord(y) in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", r.value - up.value - down.value});
    r.decomposition.push_back({"ord(y) > " + std::to_string(hi), up.value});
    r.decomposition.push_back({"ord(y) < " + std::to_string(lo), down.value});
    r.tail = up.tail ? up.tail : down.tail;
    return r;
  }

 private:
  struct Interval {
    int lo;
    std::optional<int> exact;
    bool empty;
    bool contains(int v) const { return !empty && v >= lo && (!exact || *exact == v); }
  };
  // alpha + beta y, monic in y.
  struct Factor {
    Poly f;
    LaurentScalar alpha;
    LaurentScalar beta;
    std::optional<int> critical;  // the ord y at which alpha and beta y can cancel
  };
  // unit(t) * prod factors^mult
  struct Product {
    int unit_ord = 0;
    std::vector<int> mult;
  };
  struct Fibre {
    int component;
    int coord;
    Product b;
    bool translated;
    int power;
  };

  // The single coordinate an atom refers to, with the atom moved to coordinate 0.
  static std::optional<std::pair<int, CoefficientAtom>> single_coordinate(const CoefficientAtom& a) {
    if (auto* x = std::get_if<CoeffEq>(&a)) return std::pair{x->i, CoefficientAtom(CoeffEq{0, x->j, x->c})};
    if (auto* x = std::get_if<CoeffNonzero>(&a)) return std::pair{x->i, CoefficientAtom(CoeffNonzero{0, x->j})};
    if (auto* x = std::get_if<OrdExact>(&a)) return std::pair{x->i, CoefficientAtom(OrdExact{0, x->e})};
    if (auto* x = std::get_if<OrdAtLeast>(&a)) return std::pair{x->i, CoefficientAtom(OrdAtLeast{0, x->e})};
    if (auto* x = std::get_if<LinearRelation>(&a)) {
      if (x->terms.empty()) return std::nullopt;
      LinearRelation moved = *x;
      for (auto& [slot, c] : moved.terms) {
        if (slot.first != x->terms.front().first.first) return std::nullopt;
        slot.first = 0;
      }
      return std::pair{x->terms.front().first.first, CoefficientAtom(moved)};
    }
    return std::nullopt;
  }

  static std::optional<std::pair<int, Condition>> single_coordinate(const Condition& c) {
    switch (c.kind()) {
      case Condition::Kind::Atom: {
        auto a = single_coordinate(c.atom());
        if (!a) return std::nullopt;
        return std::pair{a->first, Condition(a->second)};
      }
      case Condition::Kind::And:
      case Condition::Kind::Or:
      case Condition::Kind::Not: {
        std::optional<int> coord;
        std::vector<Condition> parts;
        for (const auto& p : c.parts()) {
          auto q = single_coordinate(p);
          if (!q || (coord && *coord != q->first)) return std::nullopt;
          coord = q->first;
          parts.push_back(q->second);
        }
        if (!coord) return std::nullopt;
        if (c.kind() == Condition::Kind::Not) return std::pair{*coord, !parts.front()};
        return std::pair{*coord, c.kind() == Condition::Kind::And ? Condition::all(parts) : Condition::any(parts)};
      }
      default:
        return std::nullopt;
    }
  }

  static void coords_in(const Condition& c, std::set<int>& out) {
    if (c.kind() != Condition::Kind::Atom) {
      for (const auto& p : c.parts()) coords_in(p, out);
      return;
    }
    std::visit(
        [&](const auto& a) {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, LinearRelation>) {
            for (const auto& [slot, k] : a.terms) out.insert(slot.first);
          } else if constexpr (std::is_same_v<A, PolyEq>) {
            for (int v : a.f.variables()) {
              if (is_slot_var(v)) out.insert(slot_coord(v));
            }
          } else {
            out.insert(a.i);
          }
        },
        c.atom());
  }

  // Renames coordinates; every referenced coordinate must be in `to`.
  static Condition remap(const Condition& c, const std::map<int, int>& to) {
    switch (c.kind()) {
      case Condition::Kind::True:
      case Condition::Kind::False:
        return c;
      case Condition::Kind::Not:
        return !remap(c.parts().front(), to);
      case Condition::Kind::And:
      case Condition::Kind::Or: {
        std::vector<Condition> parts;
        for (const auto& p : c.parts()) parts.push_back(remap(p, to));
        return c.kind() == Condition::Kind::And ? Condition::all(std::move(parts)) : Condition::any(std::move(parts));
      }
      case Condition::Kind::Atom:
        break;
    }
    return std::visit(
        [&](auto a) -> Condition {
          using A = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<A, LinearRelation>) {
            for (auto& [slot, k] : a.terms) slot.first = to.at(slot.first);
          } else if constexpr (std::is_same_v<A, PolyEq>) {
            Poly f;
            for (const auto& [m, k] : a.f.terms()) {
              Monomial moved;
              for (const auto& [v, e] : m) {
                moved.emplace_back(is_slot_var(v) ? slot_var(to.at(slot_coord(v)), slot_index(v)) : v, e);
              }
              std::sort(moved.begin(), moved.end());
              f += Poly::term(k, moved);
            }
            a.f = f;
          } else {
            a.i = to.at(a.i);
          }
          return Condition(a);
        },
        c.atom());
  }

  // Ord atoms become intervals; atoms on one coordinate are kept per
  // coordinate; the rest couple several coordinates.
  static bool collect_intervals(const Condition& c, std::vector<Interval>& out, std::vector<std::vector<Condition>>& own,
                                std::vector<bool>& coefficient, std::vector<Condition>& coupled) {
    switch (c.kind()) {
      case Condition::Kind::True:
        return true;
      case Condition::Kind::False:
        return false;
      case Condition::Kind::And:
        return std::all_of(c.parts().begin(), c.parts().end(),
                           [&](const Condition& p) { return collect_intervals(p, out, own, coefficient, coupled); });
      default:
        break;
    }
    auto moved = single_coordinate(c);
    if (!moved) {
      coupled.push_back(c);
      return true;
    }
    const auto i = static_cast<std::size_t>(moved->first);
    own[i].push_back(moved->second);
    if (c.kind() != Condition::Kind::Atom) {
      coefficient[i] = true;
      return true;
    }
    if (auto* x = std::get_if<OrdAtLeast>(&c.atom())) {
      out[i].lo = std::max(out[i].lo, x->e);
    } else if (auto* x = std::get_if<OrdExact>(&c.atom())) {
      if (out[i].exact && *out[i].exact != x->e) out[i].empty = true;
      out[i].exact = x->e;
    } else {
      coefficient[i] = true;
    }
    for (auto& iv : out) iv.empty = iv.empty || (iv.exact && *iv.exact < iv.lo);
    return true;
  }

  int y() const { return coord_var(base_); }

  // Writes a polynomial in y and t as unit(t) * prod factors^mult, adding factors as needed.
  std::optional<Product> factor(Poly p, int sign) {
    Product out;
    out.mult.assign(factors_.size(), 0);
    if (p.is_zero()) return std::nullopt;
    for (const auto& v : p.variables()) {
      if (v != 0 && v != y()) return std::nullopt;
    }
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (factors_[k].f == Poly::var(y())) continue;
      while (p.has_var(y())) {
        auto q = divide_exact(p, factors_[k].f);
        if (!q || q->min_degree_in(y()) < 0) break;
        p = *q;
        out.mult[k] += sign;
      }
    }
    while (p.has_var(y())) {
      const int low = p.min_degree_in(y());
      if (low != 0) {
        std::size_t k = 0;
        while (k < factors_.size() && !(factors_[k].f == Poly::var(y()))) ++k;
        if (k == factors_.size()) add_factor(Poly::var(y()), out);
        out.mult[k] += sign * low;
        p = p.times_monomial({{y(), -low}});
        continue;
      }
      if (p.degree_in(y()) != 1) {
        // A repeated factor: split off gcd(p, dp/dy).
        const Poly g = gcd(p, p.derivative(y()));
        if (!g.has_var(y())) return std::nullopt;
        auto inner = factor(g, sign);
        if (!inner) return std::nullopt;
        out.mult.resize(factors_.size(), 0);
        for (std::size_t k = 0; k < inner->mult.size(); ++k) out.mult[k] += inner->mult[k];
        out.unit_ord += inner->unit_ord;
        p = *divide_exact(p, g);
        continue;
      }
      add_factor(p.monic(), out);
      out.mult.back() += sign;
      p = *divide_exact(p, factors_.back().f);
    }
    out.unit_ord += sign * LaurentScalar::from_poly(p).ord();
    out.mult.resize(factors_.size(), 0);
    return out;
  }

  void add_factor(const Poly& f, Product& out) {
    const auto parts = f.coeffs_in(y());
    Factor k;
    k.f = f;
    k.beta = LaurentScalar::from_poly(parts.at(1));
    k.alpha = parts.count(0) ? LaurentScalar::from_poly(parts.at(0)) : LaurentScalar();
    if (!k.alpha.is_known_zero()) k.critical = k.alpha.ord() - k.beta.ord();
    factors_.push_back(k);
    out.mult.push_back(0);
  }

  std::optional<Product> factor(const RatFunc& r) {
    auto num = factor(r.num(), 1);
    if (!num) return std::nullopt;
    auto den = factor(r.den(), -1);
    if (!den) return std::nullopt;
    Product out;
    out.unit_ord = num->unit_ord + den->unit_ord;
    out.mult.assign(factors_.size(), 0);
    for (std::size_t k = 0; k < num->mult.size(); ++k) out.mult[k] += num->mult[k];
    for (std::size_t k = 0; k < den->mult.size(); ++k) out.mult[k] += den->mult[k];
    return out;
  }

  // Each non-base component must be b(y) x_j + a with x_j its own coordinate;
  // a may involve other fibre coordinates as long as the dependencies are
  // acyclic, so that the fibres can be integrated one after another.
  bool fit(const RationalMap& h, const std::map<int, int>& powers) {
    const int d = static_cast<int>(h.components.size());
    std::vector<std::vector<Fibre>> options(static_cast<std::size_t>(d));
    std::vector<std::vector<std::set<int>>> deps(static_cast<std::size_t>(d));
    int base_components = 0;
    auto coords_of = [](const RatFunc& c) {
      std::set<int> coords;
      for (int v : c.variables()) {
        if (v != 0) coords.insert(var_coord(v));
      }
      return coords;
    };
    // Coefficient conditions on the base component: integrate over the target
    // base coordinate instead, which needs the base map to be a Moebius map.
    for (int i = 0; i < d; ++i) {
      const RatFunc& c = h.components[static_cast<std::size_t>(i)];
      const auto coords = coords_of(c);
      const bool needs_target = own_volume_[static_cast<std::size_t>(i)] || coupled_coords_.count(i);
      if (coords.size() != 1 || *coords.begin() != base_ || !needs_target) continue;
      // Monomials sit in the numerator; move negative powers of y to the denominator.
      const Monomial lift{{y(), std::max(0, -c.num().min_degree_in(y()))}};
      const Poly num = lift.front().second ? c.num().times_monomial(lift) : c.num();
      const Poly den = lift.front().second ? c.den().times_monomial(lift) : c.den();
      if (num.degree_in(y()) > 1 || den.degree_in(y()) > 1) return false;
      auto part = [&](const Poly& p, int k) {
        const auto cs = p.coeffs_in(y());
        return cs.count(k) ? cs.at(k) : Poly();
      };
      const Poly alpha = part(num, 1), beta = part(num, 0), gamma = part(den, 1), delta = part(den, 0);
      if ((alpha * delta - beta * gamma).is_zero()) return false;
      const Poly yv = Poly::var(y());
      psi_ = RatFunc(delta * yv - beta, alpha - gamma * yv);
      target_mode_ = true;
      base_condition_ = Condition::all(own_[static_cast<std::size_t>(i)]) && Condition(OrdAtLeast{0, -target_pole_});
    }
    for (int i = 0; i < d; ++i) {
      const RatFunc& c = h.components[static_cast<std::size_t>(i)];
      const auto coords = coords_of(c);
      if (coords.size() == 1 && *coords.begin() == base_) {
        if (target_mode_) {
          base_component_ = i;
          ++base_components;
          continue;
        }
        if (own_volume_[static_cast<std::size_t>(i)]) return false;
        auto p = factor(c);
        if (!p) return false;
        base_component_ = i;
        base_value_ = *p;
        ++base_components;
        continue;
      }
      for (int v : coords) {
        if (v == base_) continue;
        const auto parts = c.num().coeffs_in(coord_var(v));
        if (!parts.count(1) || parts.rbegin()->first != 1 || parts.begin()->first < 0) continue;
        RatFunc slope(parts.at(1), c.den());
        const auto slope_vars = slope.variables();
        if (std::any_of(slope_vars.begin(), slope_vars.end(), [&](int u) { return u != 0 && u != y(); })) continue;
        if (target_mode_) slope = slope.substitute(y(), psi_);
        auto b = factor(slope);
        if (!b) continue;
        const bool translated = parts.count(0) > 0;
        const int power = powers.count(v) ? powers.at(v) : 0;
        if ((translated || coupled_coords_.count(i)) && power != 0) continue;
        std::set<int> needs;
        if (translated) {
          for (int u : parts.at(0).variables()) {
            if (u != 0 && var_coord(u) != base_) needs.insert(var_coord(u));
          }
        }
        options[static_cast<std::size_t>(i)].push_back(Fibre{i, v, *b, translated, power});
        deps[static_cast<std::size_t>(i)].push_back(needs);
      }
      if (options[static_cast<std::size_t>(i)].empty()) return false;
    }
    if (base_components != 1) return false;
    if (target_mode_) {
      // y = psi(y'): density L^(-power ord y) dy = L^(-power ord psi - ord psi') dy'.
      auto value = factor(psi_);
      auto jac = factor(psi_.derivative(y()));
      if (!value || !jac) return false;
      base_weight_.unit_ord = base_power_ * value->unit_ord + jac->unit_ord;
      base_weight_.mult.assign(factors_.size(), 0);
      value->mult.resize(factors_.size(), 0);
      jac->mult.resize(factors_.size(), 0);
      for (std::size_t k = 0; k < factors_.size(); ++k) base_weight_.mult[k] = base_power_ * value->mult[k] + jac->mult[k];
    }
    base_value_.mult.resize(factors_.size(), 0);
    // Choose one option per fibre component: distinct coordinates, acyclic dependencies.
    std::vector<int> pick(static_cast<std::size_t>(d), -1);
    std::function<bool(int)> search = [&](int i) -> bool {
      if (i == d) return acyclic(options, deps, pick);
      if (i == base_component_) return search(i + 1);
      for (std::size_t k = 0; k < options[static_cast<std::size_t>(i)].size(); ++k) {
        const int v = options[static_cast<std::size_t>(i)][k].coord;
        bool taken = false;
        for (int j = 0; j < i; ++j) {
          taken = taken || (j != base_component_ && options[static_cast<std::size_t>(j)][static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])].coord == v);
        }
        if (taken) continue;
        pick[static_cast<std::size_t>(i)] = static_cast<int>(k);
        if (search(i + 1)) return true;
      }
      return false;
    };
    if (!search(0)) return false;
    for (int i = 0; i < d; ++i) {
      if (i == base_component_) continue;
      Fibre f = options[static_cast<std::size_t>(i)][static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
      f.b.mult.resize(factors_.size(), 0);
      fibres_.push_back(f);
    }
    return joint();
  }

  // Coupled fibre coordinates are measured together: on a cell the map
  // x_j -> b_j x_j + a_j scales their joint volume by L^(sum ord b_j). The
  // base joins them as coordinate 0 when a coupled atom mentions it.
  bool joint() {
    if (coupled_coords_.empty()) return true;
    std::map<int, int> to;
    if (coupled_coords_.count(base_component_)) to[base_component_] = 0;
    std::vector<Condition> parts{coupled_};
    for (int i : coupled_coords_) {
      if (i == base_component_) continue;
      const int k = static_cast<int>(to.size());
      to[i] = k;
      parts.emplace_back(OrdAtLeast{i, -target_pole_});
      for (const auto& c : own_[static_cast<std::size_t>(i)]) parts.push_back(remap(c, {{0, i}}));
    }
    joint_dim_ = static_cast<int>(to.size());
    joint_condition_ = remap(Condition::all(std::move(parts)), to);
    if (!to.count(base_component_)) {
      joint_volume_ = measure_bounded(CylinderSet{joint_dim_, target_pole_, joint_condition_});
    }
    return true;
  }

  bool acyclic(const std::vector<std::vector<Fibre>>& options, const std::vector<std::vector<std::set<int>>>& deps,
               const std::vector<int>& pick) const {
    // coordinate -> coordinates its translation part needs
    std::map<int, std::set<int>> graph;
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (static_cast<int>(i) == base_component_) continue;
      const auto k = static_cast<std::size_t>(pick[i]);
      graph[options[i][k].coord] = deps[i][k];
    }
    std::map<int, int> state;
    std::function<bool(int)> visit = [&](int v) -> bool {
      if (state[v] == 1) return false;
      if (state[v] == 2) return true;
      state[v] = 1;
      for (int u : graph[v]) {
        if (!visit(u)) return false;
      }
      state[v] = 2;
      return true;
    };
    return std::all_of(graph.begin(), graph.end(), [&](const auto& kv) { return visit(kv.first); });
  }

  int product_ord(const Product& p, const std::vector<int>& ords) const {
    int v = p.unit_ord;
    for (std::size_t k = 0; k < p.mult.size(); ++k) v += p.mult[k] * ords[k];
    return v;
  }

  const MotClass& weighted_own(int component, int power) const {
    auto key = std::pair{component, power};
    auto it = weighted_own_.find(key);
    if (it == weighted_own_.end()) {
      const CylinderSet c{1, target_pole_, Condition::all(own_[static_cast<std::size_t>(component)])};
      it = weighted_own_.emplace(key, integrate_weighted(WeightSpec::coordinate(0, power), c).value).first;
    }
    return it->second;
  }

  // Integrand over the fibres times the base weight, for given factor orders.
  MotClass fibre_value(int r, const std::vector<int>& ords) const {
    MotClass v;
    if (target_mode_) {
      Product w = base_weight_;
      w.mult.resize(factors_.size(), 0);
      v = MotClass::L_pow(-product_ord(w, ords));
    } else {
      if (!bounds_[static_cast<std::size_t>(base_component_)].contains(product_ord(base_value_, ords))) return {};
      v = MotClass::L_pow(-base_power_ * r);
    }
    if (joint_volume_) v *= *joint_volume_;
    for (const auto& f : fibres_) {
      const Interval& iv = bounds_[static_cast<std::size_t>(f.component)];
      if (iv.empty) return {};
      const int shift = product_ord(f.b, ords);
      if (coupled_coords_.count(f.component)) {
        v *= MotClass::L_pow(shift);
        continue;
      }
      if (const auto& own = own_volume_[static_cast<std::size_t>(f.component)]) {
        if (f.power == 0) {
          v *= MotClass::L_pow(shift) * *own;
        } else {
          // s' = b s with density L^(-p ord s): L^((1 + p) ord b) times the weighted volume of the condition.
          v *= MotClass::L_pow((1 + f.power) * shift) * weighted_own(f.component, f.power);
        }
        continue;
      }
      const MotClass shell = MotClass::L() - MotClass(1);
      if (iv.exact) {
        const int e = *iv.exact - shift;
        v *= shell * MotClass::L_pow(-(1 + f.power) * e);
      } else {
        v *= geometric_sum(shell, 1 + f.power, iv.lo - shift);
      }
    }
    return v;
  }

  MotClass at_order(int r) const {
    std::vector<int> ords(factors_.size());
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      const Factor& f = factors_[k];
      if (f.critical && *f.critical == r) {
        open.push_back(k);
      } else if (f.alpha.is_known_zero()) {
        ords[k] = f.beta.ord() + r;
      } else {
        ords[k] = std::min(f.alpha.ord(), f.beta.ord() + r);
      }
    }
    return cells(r, open, 0, ords, Condition(OrdExact{0, r}));
  }

  MotClass cells(int r, const std::vector<std::size_t>& open, std::size_t idx, std::vector<int>& ords,
                 const Condition& cell) const {
    const int pole = target_mode_ ? std::max({0, -r, target_pole_}) : std::max(0, -r);
    if (idx == open.size()) {
      const MotClass fibre = fibre_value(r, ords);
      if (fibre.is_zero()) return {};
      if (joint_dim_ > 0 && !joint_volume_) {
        return measure_bounded(CylinderSet{joint_dim_, pole, cell && base_condition_ && joint_condition_}) * fibre;
      }
      return measure_bounded(CylinderSet{1, pole, target_mode_ ? cell && base_condition_ : cell}) * fibre;
    }
    const Factor& f = factors_[open[idx]];
    StrataPolicy policy;
    policy.check_from = f.alpha.ord() + 4;
    policy.window = 3;
    auto term = [&](int o) {
      ords[open[idx]] = o;
      return cells(r, open, idx + 1, ords, cell && ord_affine_exact(0, f.alpha, f.beta, o, pole));
    };
    return sum_strata(term, f.alpha.ord(), nullptr, policy, "ord(" + f.f.to_string(coord_name) + ")").value;
  }

  int base_ = 0;
  int base_component_ = 0;
  int base_power_ = 0;
  Product base_value_;
  // Target mode: the sum runs over y' = h_base(y), with y = psi(y').
  bool target_mode_ = false;
  RatFunc psi_;
  Product base_weight_;
  Condition base_condition_;
  int target_pole_ = 0;
  std::vector<std::vector<Condition>> own_;
  Condition coupled_;
  std::set<int> coupled_coords_;
  int joint_dim_ = 0;
  Condition joint_condition_;
  std::optional<MotClass> joint_volume_;
  mutable std::map<std::pair<int, int>, MotClass> weighted_own_;
  std::vector<Factor> factors_;
  std::vector<Fibre> fibres_;
  std::vector<Interval> bounds_;
  std::vector<std::optional<MotClass>> own_volume_;
};

// Preimage through stratification of the domain.
class StrataPreimage {
 public:
  StrataPreimage(const RationalMap& h, const CylinderSet& target, const WeightSpec& w)
      : d_(target.dim), w_(w) {
    for (const auto& c : h.components) {
      Piece piece;
      Monomial mu;
      for (int v : c.num().variables()) {
        if (v == 0) continue;
        const int k = -c.num().min_degree_in(v);
        if (k > 0) {
          mu.emplace_back(v, k);
          piece.den.emplace_back(var_index(StrataVar{Poly::var(v), var_coord(v)}), k);
        }
      }
      piece.num = c.num().times_monomial(mu);
      piece.full_den = c.den().times_monomial(mu);
      bool coordinate_den = false;
      for (int v : c.den().variables()) coordinate_den = coordinate_den || v != 0;
      // A denominator in t alone is a unit of order 0.
      if (coordinate_den) piece.den.emplace_back(var_index(StrataVar{c.den().monic(), -1}), 1);
      pieces_.push_back(std::move(piece));
    }
    std::vector<Condition> parts{target.condition};
    for (int i = 0; i < d_; ++i) parts.emplace_back(OrdAtLeast{i, -target.pole_bound});
    target_ = Condition::all(std::move(parts));
  }

  MeasureResult run() {
    std::map<int, MotClass> cache;
    auto bounded = [&](int n) {
      if (n < 0) return MotClass();
      auto it = cache.find(n);
      if (it == cache.end()) it = cache.emplace(n, level(n, 0, Condition::truth())).first;
      return it->second;
    };
    StrataPolicy policy;
    policy.check_from = 6;
    return sum_strata([&](int n) { return bounded(n) - bounded(n - 1); }, 0, nullptr, policy, "pole order");
  }

 private:
  struct StrataVar {
    Poly f;
    int coord = -1;
    bool operator==(const StrataVar& o) const { return coord == o.coord && f == o.f; }
  };
  struct Piece {
    Poly num;
    std::vector<std::pair<std::size_t, int>> den;  // (strata variable, multiplicity)
    Poly full_den;                                 // component = num / full_den
  };
  // Coefficient of a component on a stratum: p / lead^e, lead the leading
  // coefficient of the denominator, which the stratum keeps nonzero.
  struct SlotValue {
    Poly p;
    Poly lead;
    int e = 0;
  };

  std::size_t var_index(const StrataVar& v) {
    auto it = std::find(vars_.begin(), vars_.end(), v);
    if (it != vars_.end()) return static_cast<std::size_t>(it - vars_.begin());
    vars_.push_back(v);
    return vars_.size() - 1;
  }

  int floor_of(std::size_t k, int n) const {
    if (vars_[k].coord >= 0) return -n;
    return *poly_ord_floor(vars_[k].f, n);
  }
  Condition exact(std::size_t k, int o, int n) const {
    if (vars_[k].coord >= 0) return OrdExact{vars_[k].coord, o};
    return poly_ord_exact(vars_[k].f, o, n);
  }
  Condition at_least(std::size_t k, int o, int n) const {
    if (vars_[k].coord >= 0) return OrdAtLeast{vars_[k].coord, o};
    return poly_ord_at_least(vars_[k].f, o, n);
  }

  bool depends_on_orders(const Condition& c) const {
    if (c.kind() == Condition::Kind::Atom) {
      const int i = atom_coord(c.atom());
      if (i == -2) return has_denominator(c.atom());
      return i >= 0 && !pieces_[static_cast<std::size_t>(i)].den.empty();
    }
    return std::any_of(c.parts().begin(), c.parts().end(), [&](const Condition& p) { return depends_on_orders(p); });
  }

  bool has_denominator(const CoefficientAtom& a) const {
    std::set<int> coords;
    if (auto* x = std::get_if<LinearRelation>(&a)) {
      for (const auto& [slot, c] : x->terms) coords.insert(slot.first);
    } else if (auto* x = std::get_if<PolyEq>(&a)) {
      for (int v : x->f.variables()) {
        if (is_slot_var(v)) coords.insert(slot_coord(v));
      }
    } else {
      coords.insert(atom_coord(a));
    }
    return std::any_of(coords.begin(), coords.end(),
                       [&](int i) { return i >= 0 && !pieces_[static_cast<std::size_t>(i)].den.empty(); });
  }

  // Coefficients qlow..j of num / full_den on a stratum where the denominator has order `o`,
  // from (num / den) * den = num.
  SlotValue quotient_coeff(const Piece& piece, int o, int n, int j, std::map<int, SlotValue>& memo) const {
    auto hit = memo.find(j);
    if (hit != memo.end()) return hit->second;
    const auto floor = poly_ord_floor(piece.num, n);
    SlotValue out;
    if (piece.full_den == Poly(1)) {
      out.p = eval_series(piece.num, n, precision_for(piece.num, n, j)).coeff(j);
      return memo[j] = out;
    }
    if (!floor || j < *floor - o) return memo[j] = out;
    const int qlow = *floor - o;
    const SlotSeries num = eval_series(piece.num, n, precision_for(piece.num, n, j + o));
    const SlotSeries den = eval_series(piece.full_den, n, precision_for(piece.full_den, n, o + j - qlow));
    out.lead = den.coeff(o);
    out.e = j - qlow + 1;
    out.p = num.coeff(j + o) * out.lead.pow(static_cast<unsigned>(j - qlow));
    for (int i = qlow; i < j; ++i) {
      const SlotValue q = quotient_coeff(piece, o, n, i, memo);
      if (q.p.is_zero()) continue;
      out.p -= q.p * den.coeff(j + o - i) * out.lead.pow(static_cast<unsigned>(j - 1 - i));
    }
    return memo[j] = out;
  }

  // f(slot values) with the leading coefficients cleared from the denominators.
  static Poly clear_denominators(const Poly& f, const std::function<SlotValue(int)>& value) {
    std::vector<std::pair<Rational, std::vector<SlotValue>>> terms;
    std::map<std::string, std::pair<Poly, int>> need;  // lead -> highest power over the terms
    for (const auto& [m, c] : f.terms()) {
      std::vector<SlotValue> factors;
      std::map<std::string, int> power;
      for (const auto& [v, k] : m) {
        SlotValue x = value(v);
        for (int r = 0; r < k; ++r) factors.push_back(x);
        if (x.e > 0) power[x.lead.to_string()] += k * x.e;
        if (x.e > 0) need.emplace(x.lead.to_string(), std::pair{x.lead, 0});
      }
      for (const auto& [key, e] : power) need[key].second = std::max(need[key].second, e);
      terms.emplace_back(c, std::move(factors));
    }
    Poly out;
    for (const auto& [c, factors] : terms) {
      Poly t(c);
      std::map<std::string, int> power;
      for (const auto& x : factors) {
        t *= x.p;
        if (x.e > 0) power[x.lead.to_string()] += x.e;
      }
      for (const auto& [key, lead] : need) {
        const int missing = lead.second - (power.count(key) ? power[key] : 0);
        if (missing > 0) t *= lead.first.pow(static_cast<unsigned>(missing));
      }
      out += t;
    }
    return out;
  }

  static Condition map_poly_atoms(const Condition& c, const std::function<Condition(const Poly&)>& f) {
    switch (c.kind()) {
      case Condition::Kind::Atom:
        return f(std::get<PolyEq>(c.atom()).f);
      case Condition::Kind::Not:
        return !map_poly_atoms(c.parts().front(), f);
      case Condition::Kind::And:
      case Condition::Kind::Or: {
        std::vector<Condition> parts;
        for (const auto& p : c.parts()) parts.push_back(map_poly_atoms(p, f));
        return c.kind() == Condition::Kind::And ? Condition::all(std::move(parts)) : Condition::any(std::move(parts));
      }
      default:
        return c;
    }
  }

  static int atom_coord(const CoefficientAtom& a) {
    if (auto* x = std::get_if<OrdAtLeast>(&a)) return x->i;
    if (auto* x = std::get_if<OrdExact>(&a)) return x->i;
    if (auto* x = std::get_if<CoeffEq>(&a)) return x->i;
    if (auto* x = std::get_if<CoeffNonzero>(&a)) return x->i;
    return -2;  // several coordinates
  }

  // Conditions on the domain slots; `ords` are exact orders of the strata
  // variables, or lower bounds when `relaxed`.
  Condition translate(const Condition& c, int n, const std::vector<int>& ords, bool relaxed) const {
    switch (c.kind()) {
      case Condition::Kind::True:
      case Condition::Kind::False:
        return c;
      case Condition::Kind::Not:
        if (relaxed && depends_on_orders(c.parts().front())) return Condition::truth();
        return !translate(c.parts().front(), n, ords, relaxed);
      case Condition::Kind::And:
      case Condition::Kind::Or: {
        std::vector<Condition> parts;
        for (const auto& p : c.parts()) parts.push_back(translate(p, n, ords, relaxed));
        return c.kind() == Condition::Kind::And ? Condition::all(std::move(parts)) : Condition::any(std::move(parts));
      }
      case Condition::Kind::Atom:
        break;
    }
    const CoefficientAtom& a = c.atom();
    auto offset = [&](int i) {
      int k = 0;
      for (const auto& [v, mult] : pieces_[static_cast<std::size_t>(i)].den) k += mult * ords[v];
      return k;
    };
    if (auto* x = std::get_if<OrdAtLeast>(&a)) {
      return poly_ord_at_least(pieces_[static_cast<std::size_t>(x->i)].num, x->e + offset(x->i), n);
    }
    if (auto* x = std::get_if<OrdExact>(&a)) {
      const Poly& num = pieces_[static_cast<std::size_t>(x->i)].num;
      if (relaxed && !pieces_[static_cast<std::size_t>(x->i)].den.empty()) {
        return poly_ord_at_least(num, x->e + offset(x->i), n);
      }
      return poly_ord_exact(num, x->e + offset(x->i), n);
    }
    if (relaxed && has_denominator(a)) return Condition::truth();
    const Condition lowered = lower_to_slots(Condition(a), target_pole_);
    if (!has_denominator(a)) {
      return substitute_slots(lowered, target_pole_, [&](int i, int j) {
        const Piece& p = pieces_[static_cast<std::size_t>(i)];
        return eval_series(p.num, n, precision_for(p.num, n, j)).coeff(j);
      });
    }
    std::map<int, std::map<int, SlotValue>> memo;
    auto value = [&](int v) {
      const int i = slot_coord(v);
      const Piece& p = pieces_[static_cast<std::size_t>(i)];
      return quotient_coeff(p, offset(i), n, slot_index(v), memo[i]);
    };
    return map_poly_atoms(lowered, [&](const Poly& f) -> Condition {
      const Poly g = clear_denominators(f, value);
      if (g.is_zero()) return Condition::truth();
      if (g.is_constant()) return Condition::falsity();
      return PolyEq{g};
    });
  }

  MotClass leaf(int n, const std::vector<int>& ords, const Condition& fixed) const {
    const Condition cell = fixed && translate(target_, n, ords, false);
    WeightSpec rest;
    rest.t_order = w_.t_order;
    int exponent = 0;
    for (const auto& f : w_.factors) {
      bool fixed_order = false;
      for (std::size_t k = 0; k < vars_.size(); ++k) {
        if (vars_[k].coord >= 0 && f.f == vars_[k].f) {
          exponent -= f.power * ords[k];
          fixed_order = true;
        }
      }
      if (!fixed_order) rest.factors.push_back(f);
    }
    return integrate_weighted(rest, CylinderSet{d_, n, cell}).value * MotClass::L_pow(exponent);
  }

  MotClass level(int n, std::size_t k, const Condition& fixed) {
    std::vector<int> ords(vars_.size());
    return descend(n, k, ords, fixed);
  }

  MotClass descend(int n, std::size_t k, std::vector<int>& ords, const Condition& fixed) {
    if (k == vars_.size()) return leaf(n, ords, fixed);
    const int low = floor_of(k, n);
    auto term = [&](int o) {
      ords[k] = o;
      return descend(n, k + 1, ords, fixed && exact(k, o, n));
    };
    auto exhausted = [&](int o) {
      std::vector<int> bounds = ords;
      bounds[k] = o + 1;
      for (std::size_t j = k + 1; j < vars_.size(); ++j) bounds[j] = floor_of(j, n);
      const Condition rest = fixed && at_least(k, o + 1, n) && translate(target_, n, bounds, true);
      return measure_bounded(CylinderSet{d_, n, rest}).is_zero();
    };
    StrataPolicy policy;
    policy.check_from = low + 6;
    const std::vector<int> saved = ords;
    MotClass v = sum_strata(term, low, exhausted, policy, "stratum").value;
    ords = saved;
    return v;
  }

  int d_;
  WeightSpec w_;
  int target_pole_ = 0;
  std::vector<StrataVar> vars_;
  std::vector<Piece> pieces_;
  Condition target_;

 public:
  void set_target_pole(int n) { target_pole_ = n; }
};

}  // namespace

namespace {

// Removes one disjunction or negation from a top-level conjunction by
// inclusion-exclusion: P & (Q | R) = P & Q + P & R - P & Q & R, P & !Q = P - P & Q.
std::optional<MeasureResult> split_preimage(const RationalMap& h, const CylinderSet& target, const WeightSpec& w) {
  const Condition& c = target.condition;
  std::vector<Condition> parts = c.kind() == Condition::Kind::And ? c.parts() : std::vector<Condition>{c};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Condition q = parts[k];
    if (q.kind() != Condition::Kind::Or && q.kind() != Condition::Kind::Not) continue;
    std::vector<Condition> rest = parts;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    const Condition p = Condition::all(rest);
    auto mu = [&](const Condition& extra) {
      return preimage_measure(h, CylinderSet{target.dim, target.pole_bound, p && extra}, w);
    };
    MeasureResult r;
    std::vector<std::pair<int, MeasureResult>> pieces;
    if (q.kind() == Condition::Kind::Not) {
      pieces = {{1, mu(Condition::truth())}, {-1, mu(q.parts().front())}};
    } else {
      const Condition first = q.parts().front();
      const Condition others = Condition::any(std::vector<Condition>(q.parts().begin() + 1, q.parts().end()));
      pieces = {{1, mu(first)}, {1, mu(others)}, {-1, mu(first && others)}};
    }
    for (const auto& [sign, m] : pieces) {
      r.value += sign > 0 ? m.value : -m.value;
      for (const auto& st : m.decomposition) r.decomposition.push_back({(sign > 0 ? "+ " : "- ") + st.label, st.value});
      if (!r.tail) r.tail = m.tail;
    }
    return r;
  }
  return std::nullopt;
}

}  // namespace

MeasureResult preimage_measure(const RationalMap& h, const CylinderSet& target, const WeightSpec& w) {
  if (static_cast<int>(h.components.size()) != target.dim) throw DomainError("map and set dimensions differ");
  if (auto f = affine_form(h)) return affine_preimage(*f, target, w);
  if (auto f = FibredPreimage::make(h, target, w)) return f->run();
  try {
    if (auto r = split_preimage(h, target, w)) return *r;
  } catch (const DivergenceError&) {
    // A piece may diverge where the whole does not.
  }
  StrataPreimage s(h, target, w);
  s.set_target_pole(target.pole_bound);
  return s.run();
}

bool order_identity_on_samples(const GroupElement& g0, const BigCellChart& chart, int samples, int max_pole,
                               std::uint64_t seed) {
  const RationalMap h = translation_map(g0, chart);
  const RatFunc p = chart.weight_p();
  const RatFunc det = jacobian_det(h);
  std::map<int, RatFunc> sub;
  for (std::size_t i = 0; i < h.components.size(); ++i) sub.emplace(coord_var(static_cast<int>(i)), h.components[i]);
  const RatFunc p_h = p.substitute(sub);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-3, 3);
  int checked = 0;
  for (int attempt = 0; attempt < 20 * samples && checked < samples; ++attempt) {
    LaurentVector u;
    for (int i = 0; i < chart.group.dim(); ++i) {
      std::map<int, Rational> terms;
      for (int j = -max_pole; j <= 3; ++j) {
        const int c = coeff(rng);
        if (c != 0) terms.emplace(j, c);
      }
      u.entries.emplace_back(terms);
    }
    try {
      const auto a = coordinate_assignment(u);
      const int lhs = ratfunc_eval(p_h, a).ord() + ratfunc_eval(det, a).ord();
      if (lhs != ratfunc_eval(p, a).ord()) return false;
      ++checked;
    } catch (const MotivicError&) {
      // The sample hit a zero of a denominator.
    }
  }
  return checked > 0;
}

InvarianceReport invariance_check(const OmegaSet& a, const GroupElement& g0, const BigCellChart& chart) {
  InvarianceReport r;
  r.left = haar_measure(a, chart).value;
  const RationalMap h = translation_map(g0, chart);
  r.route = affine_form(h) ? "affine" : (FibredPreimage::make(h, a.chart_part, chart.weight()) ? "fibred" : "strata");
  r.right_detail = preimage_measure(h, a.chart_part, chart.weight());
  r.right = r.right_detail.value;
  r.order_identity = order_identity_on_samples(g0, chart, 6, 2, 7);
  r.ok = r.left == r.right && r.order_identity;
  return r;
}

// ------------------------------------------------------------ pole strata

PoleStrata pole_stratify(const OmegaSet& b) {
  PoleStrata out;
  const CylinderSet& a = b.chart_part;
  for (int n = 0; n <= a.pole_bound; ++n) {
    std::vector<Condition> parts{a.condition};
    std::vector<Condition> reach;
    for (int i = 0; i < a.dim; ++i) {
      parts.emplace_back(OrdAtLeast{i, -n});
      reach.emplace_back(OrdExact{i, -n});
    }
    if (n > 0) parts.push_back(Condition::any(std::move(reach)));
    CylinderSet s{a.dim, a.pole_bound, Condition::all(std::move(parts))};
    if (!measure_bounded(s).is_zero()) out.strata.emplace_back(n, s);
  }
  out.infinity_tag = !b.complement.empty();
  return out;
}

bool complement_dimension_drop(int max_level, long long q) {
  Rational previous = 2;
  for (int m = 0; m <= max_level; ++m) {
    const Rational ratio = Rational(count_sl2_corner_zero_jets(m, q)) / Rational(ipow(q, 3 * (m + 1)));
    if (!(ratio < previous) || !(ratio < 1)) return false;
    previous = ratio;
  }
  return true;
}

ChartReport chart_independence_check(const OmegaSet& a, const BigCellChart& chart1, const BigCellChart& chart2) {
  ChartReport r;
  r.first = haar_measure(a, chart1).value;
  // Points of chart 2 whose chart-1 coordinates lie in A.
  const RationalMap transition = RationalMap::from_components(chart1.embed(chart2.extract()));
  r.second = preimage_measure(transition, a.chart_part, chart2.weight()).value;
  r.ok = r.first == r.second;
  return r;
}

// ----------------------------------------------------- canonical measure

CylinderSet integral_stratum(int e) {
  const Poly x = Poly::var(coord_var(0));
  const Poly y = Poly::var(coord_var(1));
  std::vector<Condition> parts{OrdExact{2, e}, OrdAtLeast{0, e}};
  parts.push_back(poly_ord_at_least(Poly(1) + x * y, e, e));
  return CylinderSet{3, e, Condition::all(std::move(parts))};
}

RestrictionReport canonical_restriction_check(const std::vector<std::pair<int, long long>>& levels,
                                              const std::vector<long long>& q_list) {
  RestrictionReport r;
  r.ok = true;
  const MotClass sl2 = MotClass::parse("L^3 - L");
  for (const auto& [m, q] : levels) {
    RestrictionRow row{m, q, (sl2 * MotClass::L_pow(3 * m)).specialize(q), count_sl2_jets(m, q), false};
    row.ok = row.expected == Rational(row.count);
    r.ok = r.ok && row.ok;
    r.rows.push_back(row);
  }
  const BigCellChart chart = BigCellChart::reference(GroupSpec::sl2());
  r.big_cell_arcs = haar_measure(OmegaSet::arcs_in_big_cell(GroupSpec::sl2()), chart).value;
  for (long long q : q_list) {
    RestrictionRow row{0, q, r.big_cell_arcs.specialize(q), count_sl2_big_cell_jets(0, q), false};
    row.ok = row.expected == Rational(row.count);
    r.ok = r.ok && row.ok;
    r.big_cell_rows.push_back(row);
  }
  StrataPolicy policy;
  policy.check_from = 4;
  const MeasureResult rest = sum_strata(
      [&](int e) { return haar_measure(OmegaSet{integral_stratum(e), ""}, chart).value; }, 1, nullptr, policy,
      "ord(s)");
  r.decomposed_total = r.big_cell_arcs + rest.value;
  r.ok = r.ok && r.big_cell_arcs == MotClass::parse("L^2 * (L - 1)") && r.decomposed_total == sl2;
  return r;
}

}  // namespace motivic
