#include "motivic/slot_series.hpp"

#include "motivic/errors.hpp"

#include <algorithm>

namespace motivic {

std::string coord_name(int v) {
  if (v == 0) return "t";
  if (is_slot_var(v)) return slot_name(v);
  return "x" + std::to_string(var_coord(v));
}

namespace {

// min over possibly infinite precisions.
int add_prec(long long a, long long b) {
  const long long r = a + b;
  if (a == kExact || b == kExact || r >= kExact) return kExact;
  return static_cast<int>(r);
}

int floor_of(const SlotSeries& s) {
  auto l = s.low();
  return l ? *l : s.precision();
}

}  // namespace

SlotSeries::SlotSeries(const Poly& constant) {
  if (!constant.is_zero()) c_.emplace(0, constant);
}

SlotSeries SlotSeries::coordinate(int i, int pole_bound, int precision) {
  SlotSeries s;
  s.prec_ = precision;
  for (int j = -pole_bound; j < precision; ++j) s.c_.emplace(j, Poly::var(slot_var(i, j)));
  return s;
}

SlotSeries SlotSeries::scalar(const LaurentScalar& c) {
  SlotSeries s;
  s.prec_ = c.precision();
  for (const auto& [j, v] : c.terms()) s.c_.emplace(j, Poly(v));
  return s;
}

Poly SlotSeries::coeff(int j) const {
  if (j >= prec_) throw IndeterminateError("series coefficient " + std::to_string(j) + " is beyond the precision");
  auto it = c_.find(j);
  return it == c_.end() ? Poly() : it->second;
}

std::optional<int> SlotSeries::low() const {
  for (const auto& [j, c] : c_) {
    if (!c.is_zero()) return j;
  }
  return std::nullopt;
}

SlotSeries SlotSeries::operator+(const SlotSeries& o) const {
  SlotSeries r;
  r.prec_ = std::min(prec_, o.prec_);
  for (const auto* s : {this, &o}) {
    for (const auto& [j, c] : s->c_) {
      if (j >= r.prec_) break;
      Poly& slot = r.c_[j];
      slot += c;
    }
  }
  std::erase_if(r.c_, [](const auto& kv) { return kv.second.is_zero(); });
  return r;
}

SlotSeries SlotSeries::operator-(const SlotSeries& o) const {
  SlotSeries neg = o;
  for (auto& [j, c] : neg.c_) c = -c;
  return *this + neg;
}

SlotSeries SlotSeries::operator*(const SlotSeries& o) const {
  SlotSeries r;
  r.prec_ = std::min(add_prec(floor_of(*this), o.prec_), add_prec(floor_of(o), prec_));
  for (const auto& [i, a] : c_) {
    if (a.is_zero()) continue;
    for (const auto& [j, b] : o.c_) {
      if (static_cast<long long>(i) + j >= r.prec_) break;
      if (b.is_zero()) continue;
      r.c_[i + j] += a * b;
    }
  }
  std::erase_if(r.c_, [](const auto& kv) { return kv.second.is_zero(); });
  return r;
}

SlotSeries SlotSeries::t_shift(int n) const {
  SlotSeries r;
  r.prec_ = add_prec(prec_, n);
  for (const auto& [j, c] : c_) r.c_.emplace(j + n, c);
  return r;
}

SlotSeries eval_series(const Poly& g, int pole_bound, int precision) {
  std::map<int, std::vector<SlotSeries>> powers;  // coordinate -> [x^0, x^1, ...]
  auto power = [&](int i, int e) -> const SlotSeries& {
    auto& list = powers[i];
    if (list.empty()) list.push_back(SlotSeries(Poly(1)));
    while (static_cast<int>(list.size()) <= e) {
      list.push_back(list.back() * SlotSeries::coordinate(i, pole_bound, precision));
    }
    return list[static_cast<std::size_t>(e)];
  };
  SlotSeries out;
  for (const auto& [m, c] : g.terms()) {
    SlotSeries term{Poly(c)};
    for (const auto& [v, e] : m) {
      if (v == 0) continue;
      if (!is_coord_var(v)) throw DomainError("series evaluation expects coordinate variables, got " + coord_name(v));
      if (e < 0) throw UnsupportedConstraintError("negative power of a coordinate in a polynomial map");
      term = term * power(var_coord(v), e);
    }
    out = out + term.t_shift(mono_exp(m, 0));
  }
  return out;
}

int precision_for(const Poly& g, int pole_bound, int index) {
  int need = -pole_bound;
  for (const auto& [m, c] : g.terms()) {
    int degree = 0;
    for (const auto& [v, e] : m) {
      if (v != 0) degree += e;
    }
    if (degree == 0) continue;
    need = std::max(need, index + 1 + (degree - 1) * pole_bound - mono_exp(m, 0));
  }
  return need;
}

namespace {

Condition zero_poly(const Poly& f) {
  if (f.is_constant()) return f.is_zero() ? Condition::truth() : Condition::falsity();
  return PolyEq{f.monic()};
}

}  // namespace

Condition poly_ord_at_least(const Poly& g, int o, int pole_bound) {
  const SlotSeries s = eval_series(g, pole_bound, precision_for(g, pole_bound, o - 1));
  std::vector<Condition> parts;
  for (const auto& [j, c] : s.coeffs()) {
    if (j >= o) break;
    parts.push_back(zero_poly(c));
  }
  return Condition::all(std::move(parts));
}

Condition poly_ord_exact(const Poly& g, int o, int pole_bound) {
  const SlotSeries s = eval_series(g, pole_bound, precision_for(g, pole_bound, o));
  std::vector<Condition> parts;
  for (const auto& [j, c] : s.coeffs()) {
    if (j >= o) break;
    parts.push_back(zero_poly(c));
  }
  parts.push_back(!zero_poly(s.coeff(o)));
  return Condition::all(std::move(parts));
}

std::optional<int> poly_ord_floor(const Poly& g, int pole_bound) {
  if (g.is_zero()) return std::nullopt;
  int bound = INT_MAX;
  for (const auto& [m, c] : g.terms()) {
    int degree = 0;
    for (const auto& [v, e] : m) {
      if (v != 0) degree += e;
    }
    bound = std::min(bound, mono_exp(m, 0) - degree * pole_bound);
  }
  // Cancellation can only push the first nonzero coefficient upwards.
  for (int index = bound;; index += 4) {
    const SlotSeries s = eval_series(g, pole_bound, precision_for(g, pole_bound, index));
    if (auto l = s.low(); l && *l <= index) return l;
  }
}

}  // namespace motivic
