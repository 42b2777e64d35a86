#include "motivic/cylinder.hpp"

#include "motivic/class_count.hpp"
#include "motivic/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace motivic {

namespace {

constexpr int kSlotStride = 65536;
constexpr int kSlotOffset = 32768;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

int slot_var(int i, int j) { return (i + 1) * kSlotStride + j + kSlotOffset; }
bool is_slot_var(int v) { return v >= kSlotStride; }
int slot_coord(int v) { return v / kSlotStride - 1; }
int slot_index(int v) { return v % kSlotStride - kSlotOffset; }
std::string slot_name(int v) {
  return "coeff(x" + std::to_string(slot_coord(v)) + ", " + std::to_string(slot_index(v)) + ")";
}

// -------------------------------------------------------------- Condition

Condition::Condition(CoefficientAtom a)
    : kind_(Kind::Atom), atom_(std::make_shared<const CoefficientAtom>(std::move(a))) {}

Condition Condition::falsity() {
  Condition c;
  c.kind_ = Kind::False;
  return c;
}

Condition Condition::all(std::vector<Condition> parts) {
  std::vector<Condition> flat;
  for (auto& p : parts) {
    if (p.kind_ == Kind::True) continue;
    if (p.kind_ == Kind::False) return falsity();
    if (p.kind_ == Kind::And) {
      flat.insert(flat.end(), p.parts_.begin(), p.parts_.end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return truth();
  if (flat.size() == 1) return flat.front();
  Condition c;
  c.kind_ = Kind::And;
  c.parts_ = std::move(flat);
  return c;
}

Condition Condition::any(std::vector<Condition> parts) {
  std::vector<Condition> flat;
  for (auto& p : parts) {
    if (p.kind_ == Kind::False) continue;
    if (p.kind_ == Kind::True) return truth();
    if (p.kind_ == Kind::Or) {
      flat.insert(flat.end(), p.parts_.begin(), p.parts_.end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return falsity();
  if (flat.size() == 1) return flat.front();
  Condition c;
  c.kind_ = Kind::Or;
  c.parts_ = std::move(flat);
  return c;
}

Condition Condition::operator!() const {
  switch (kind_) {
    case Kind::True:
      return falsity();
    case Kind::False:
      return truth();
    case Kind::Not:
      return parts_.front();
    default: {
      Condition c;
      c.kind_ = Kind::Not;
      c.parts_ = {*this};
      return c;
    }
  }
}

namespace {

std::optional<int> atom_max_index(const CoefficientAtom& a) {
  return std::visit(Overloaded{
                        [](const CoeffEq& x) -> std::optional<int> { return x.j; },
                        [](const CoeffNonzero& x) -> std::optional<int> { return x.j; },
                        [](const OrdExact& x) -> std::optional<int> { return x.e; },
                        [](const OrdAtLeast& x) -> std::optional<int> { return x.e - 1; },
                        [](const LinearRelation& x) -> std::optional<int> {
                          std::optional<int> m;
                          for (const auto& [slot, c] : x.terms) m = std::max(m.value_or(slot.second), slot.second);
                          return m;
                        },
                        [](const PolyEq& x) -> std::optional<int> {
                          std::optional<int> m;
                          for (int v : x.f.variables()) m = std::max(m.value_or(slot_index(v)), slot_index(v));
                          return m;
                        },
                    },
                    a);
}

std::optional<int> atom_min_index(const CoefficientAtom& a) {
  return std::visit(Overloaded{
                        [](const CoeffEq& x) -> std::optional<int> { return x.j; },
                        [](const CoeffNonzero& x) -> std::optional<int> { return x.j; },
                        [](const OrdExact& x) -> std::optional<int> { return x.e; },
                        [](const OrdAtLeast& x) -> std::optional<int> { return x.e - 1; },
                        [](const LinearRelation& x) -> std::optional<int> {
                          std::optional<int> m;
                          for (const auto& [slot, c] : x.terms) m = std::min(m.value_or(slot.second), slot.second);
                          return m;
                        },
                        [](const PolyEq& x) -> std::optional<int> {
                          std::optional<int> m;
                          for (int v : x.f.variables()) m = std::min(m.value_or(slot_index(v)), slot_index(v));
                          return m;
                        },
                    },
                    a);
}

int atom_max_coord(const CoefficientAtom& a) {
  return std::visit(Overloaded{
                        [](const CoeffEq& x) { return x.i; },
                        [](const CoeffNonzero& x) { return x.i; },
                        [](const OrdExact& x) { return x.i; },
                        [](const OrdAtLeast& x) { return x.i; },
                        [](const LinearRelation& x) {
                          int m = -1;
                          for (const auto& [slot, c] : x.terms) m = std::max(m, slot.first);
                          return m;
                        },
                        [](const PolyEq& x) {
                          int m = -1;
                          for (int v : x.f.variables()) m = std::max(m, slot_coord(v));
                          return m;
                        },
                    },
                    a);
}

std::string coeff_text(int i, int j) { return "coeff(x" + std::to_string(i) + ", " + std::to_string(j) + ")"; }

std::string linear_text(const LinearRelation& x) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [slot, c0] : x.terms) {
    Rational c = c0;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (c < 0) c = -c;
    if (c != 1) os << c << "*";
    os << coeff_text(slot.first, slot.second);
    first = false;
  }
  if (first) os << "0";
  os << " == " << x.rhs;
  return os.str();
}

std::string atom_text(const CoefficientAtom& a) {
  return std::visit(Overloaded{
                        [](const CoeffEq& x) { return coeff_text(x.i, x.j) + " == " + x.c.str(); },
                        [](const CoeffNonzero& x) { return coeff_text(x.i, x.j) + " != 0"; },
                        [](const OrdExact& x) { return "ord(x" + std::to_string(x.i) + ") == " + std::to_string(x.e); },
                        [](const OrdAtLeast& x) {
                          return "ord(x" + std::to_string(x.i) + ") >= " + std::to_string(x.e);
                        },
                        [](const LinearRelation& x) { return linear_text(x); },
                        [](const PolyEq& x) { return x.f.to_string(slot_name) + " == 0"; },
                    },
                    a);
}

}  // namespace

std::optional<int> Condition::max_index() const {
  if (kind_ == Kind::Atom) return atom_max_index(*atom_);
  std::optional<int> m;
  for (const auto& p : parts_) {
    auto k = p.max_index();
    if (k) m = std::max(m.value_or(*k), *k);
  }
  return m;
}

std::optional<int> Condition::min_index() const {
  if (kind_ == Kind::Atom) return atom_min_index(*atom_);
  std::optional<int> m;
  for (const auto& p : parts_) {
    auto k = p.min_index();
    if (k) m = std::min(m.value_or(*k), *k);
  }
  return m;
}

int Condition::max_coord() const {
  if (kind_ == Kind::Atom) return atom_max_coord(*atom_);
  int m = -1;
  for (const auto& p : parts_) m = std::max(m, p.max_coord());
  return m;
}

std::string Condition::to_string() const {
  switch (kind_) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Atom:
      return atom_text(*atom_);
    case Kind::Not: {
      const Condition& inner = parts_.front();
      if (inner.kind_ == Kind::Atom && std::holds_alternative<CoeffEq>(*inner.atom_)) {
        const auto& x = std::get<CoeffEq>(*inner.atom_);
        return coeff_text(x.i, x.j) + " != " + x.c.str();
      }
      if (inner.kind_ == Kind::Atom && std::holds_alternative<PolyEq>(*inner.atom_)) {
        return std::get<PolyEq>(*inner.atom_).f.to_string(slot_name) + " != 0";
      }
      return "!(" + inner.to_string() + ")";
    }
    case Kind::And:
    case Kind::Or: {
      std::string sep = kind_ == Kind::And ? " & " : " | ";
      std::string out;
      for (std::size_t k = 0; k < parts_.size(); ++k) {
        if (k) out += sep;
        const bool wrap = parts_[k].kind_ == Kind::And || parts_[k].kind_ == Kind::Or;
        out += wrap ? "(" + parts_[k].to_string() + ")" : parts_[k].to_string();
      }
      return out;
    }
  }
  return "";
}

// ------------------------------------------------------------- CylinderSet

CylinderSet CylinderSet::full(int dim, int pole_bound) { return CylinderSet{dim, pole_bound, Condition::truth()}; }

CylinderSet CylinderSet::empty(int dim) { return CylinderSet{dim, 0, Condition::falsity()}; }

int CylinderSet::level() const { return stable_level(*this); }

std::string CylinderSet::to_string() const {
  return "dim " + std::to_string(dim) + "; polebound " + std::to_string(pole_bound) + "; " + condition.to_string();
}

int stable_level(const CylinderSet& a) {
  auto m = a.condition.max_index();
  if (!m) return 0;
  return std::max(0, *m + a.pole_bound);
}

// ---------------------------------------------------------------- lowering

namespace {

Condition poly_atom(const Poly& f) {
  if (f.is_constant()) return f.is_zero() ? Condition::truth() : Condition::falsity();
  return Condition(PolyEq{f.monic()});
}

Poly slot(int i, int j) { return Poly::var(slot_var(i, j)); }

// Slots below the pole bound are identically zero.
Poly clip_slots(const Poly& f, int pole_bound) {
  Poly out = f;
  for (int v : f.variables()) {
    if (slot_index(v) < -pole_bound) out = out.substitute(v, Poly());
  }
  return out;
}

Condition lower_atom(const CoefficientAtom& a, int n) {
  return std::visit(
      Overloaded{
          [&](const CoeffEq& x) {
            if (x.j < -n) return x.c == 0 ? Condition::truth() : Condition::falsity();
            return poly_atom(slot(x.i, x.j) - Poly(x.c));
          },
          [&](const CoeffNonzero& x) {
            if (x.j < -n) return Condition::falsity();
            return !poly_atom(slot(x.i, x.j));
          },
          [&](const OrdAtLeast& x) {
            std::vector<Condition> parts;
            for (int j = -n; j < x.e; ++j) parts.push_back(poly_atom(slot(x.i, j)));
            return Condition::all(std::move(parts));
          },
          [&](const OrdExact& x) {
            if (x.e < -n) return Condition::falsity();
            std::vector<Condition> parts;
            for (int j = -n; j < x.e; ++j) parts.push_back(poly_atom(slot(x.i, j)));
            parts.push_back(!poly_atom(slot(x.i, x.e)));
            return Condition::all(std::move(parts));
          },
          [&](const LinearRelation& x) {
            Poly f = -Poly(x.rhs);
            for (const auto& [s, c] : x.terms) {
              if (s.second >= -n) f += slot(s.first, s.second).scaled(c);
            }
            return poly_atom(f);
          },
          [&](const PolyEq& x) { return poly_atom(clip_slots(x.f, n)); },
      },
      a);
}

Condition map_atoms(const Condition& c, const std::function<Condition(const CoefficientAtom&)>& fn) {
  switch (c.kind()) {
    case Condition::Kind::True:
    case Condition::Kind::False:
      return c;
    case Condition::Kind::Atom:
      return fn(c.atom());
    case Condition::Kind::Not:
      return !map_atoms(c.parts().front(), fn);
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      std::vector<Condition> parts;
      for (const auto& p : c.parts()) parts.push_back(map_atoms(p, fn));
      return c.kind() == Condition::Kind::And ? Condition::all(std::move(parts)) : Condition::any(std::move(parts));
    }
  }
  return c;
}

Poly substitute_all(const Poly& f, const std::map<int, Poly>& values) {
  Poly out;
  std::map<std::pair<int, int>, Poly> powers;
  for (const auto& [m, c] : f.terms()) {
    Poly term(c);
    for (const auto& [v, e] : m) {
      auto it = values.find(v);
      if (it == values.end()) {
        term *= Poly::var(v, e);
        continue;
      }
      auto key = std::make_pair(v, e);
      auto p = powers.find(key);
      if (p == powers.end()) p = powers.emplace(key, it->second.pow(static_cast<unsigned>(e))).first;
      term *= p->second;
    }
    out += term;
  }
  return out;
}

}  // namespace

Condition lower_to_slots(const Condition& c, int pole_bound) {
  return map_atoms(c, [&](const CoefficientAtom& a) { return lower_atom(a, pole_bound); });
}

Condition substitute_slots(const Condition& c, int pole_bound, const std::function<Poly(int, int)>& slot_value) {
  return map_atoms(lower_to_slots(c, pole_bound), [&](const CoefficientAtom& a) {
    const Poly& f = std::get<PolyEq>(a).f;
    std::map<int, Poly> values;
    for (int v : f.variables()) values.emplace(v, slot_value(slot_coord(v), slot_index(v)));
    return poly_atom(substitute_all(f, values));
  });
}

// --------------------------------------------------------------- jet class

namespace {

// Class of the constructible set described by a formula whose atoms are PolyEq.
class FormulaCounter {
 public:
  explicit FormulaCounter(std::set<int> vars) : vars_(std::move(vars)) {}

  MotClass run(const Condition& f) {
    std::vector<Poly> eqs;
    std::vector<Poly> neqs;
    return expand(f, eqs, neqs);
  }

 private:
  static bool literal(const Condition& c, std::vector<Poly>& eqs, std::vector<Poly>& neqs) {
    if (c.kind() == Condition::Kind::Atom) {
      eqs.push_back(std::get<PolyEq>(c.atom()).f);
      return true;
    }
    if (c.kind() == Condition::Kind::Not && c.parts().front().kind() == Condition::Kind::Atom) {
      neqs.push_back(std::get<PolyEq>(c.parts().front().atom()).f);
      return true;
    }
    return false;
  }

  static const Poly* first_atom(const Condition& c) {
    if (c.kind() == Condition::Kind::Atom) return &std::get<PolyEq>(c.atom()).f;
    for (const auto& p : c.parts()) {
      if (const Poly* f = first_atom(p)) return f;
    }
    return nullptr;
  }

  static Condition assign(const Condition& c, const Poly& f, bool value) {
    return map_atoms(c, [&](const CoefficientAtom& a) {
      if (std::get<PolyEq>(a).f == f) return value ? Condition::truth() : Condition::falsity();
      return Condition(a);
    });
  }

  MotClass expand(const Condition& f, std::vector<Poly>& eqs, std::vector<Poly>& neqs) {
    if (f.kind() == Condition::Kind::False) return {};
    if (f.kind() == Condition::Kind::True) return count_class(eqs, neqs, vars_);
    // A conjunction of literals is counted directly.
    {
      std::vector<Poly> e2 = eqs;
      std::vector<Poly> n2 = neqs;
      bool all_literals = literal(f, e2, n2);
      if (!all_literals && f.kind() == Condition::Kind::And) {
        all_literals = true;
        for (const auto& p : f.parts()) {
          if (!literal(p, e2, n2)) {
            all_literals = false;
            break;
          }
        }
      }
      if (all_literals) return count_class(e2, n2, vars_);
    }
    const Poly pivot = *first_atom(f);
    eqs.push_back(pivot);
    MotClass zero_branch = expand(assign(f, pivot, true), eqs, neqs);
    eqs.pop_back();
    neqs.push_back(pivot);
    MotClass nonzero_branch = expand(assign(f, pivot, false), eqs, neqs);
    neqs.pop_back();
    return zero_branch + nonzero_branch;
  }

  std::set<int> vars_;
};

std::set<int> condition_vars(const Condition& c) {
  std::set<int> out;
  if (c.kind() == Condition::Kind::Atom) {
    for (int v : std::get<PolyEq>(c.atom()).f.variables()) out.insert(v);
    return out;
  }
  for (const auto& p : c.parts()) {
    auto s = condition_vars(p);
    out.insert(s.begin(), s.end());
  }
  return out;
}

}  // namespace

MotClass jet_class(const CylinderSet& a, int m) {
  const int n = a.pole_bound;
  if (m < stable_level(a)) {
    throw DomainError("jet level " + std::to_string(m) + " is below the stable level " +
                      std::to_string(stable_level(a)));
  }
  const Condition f = lower_to_slots(a.condition, n);
  if (a.condition.max_coord() >= a.dim) throw DomainError("condition mentions a coordinate beyond the dimension");
  const int total_slots = a.dim * (m + 1);

  // Conjuncts over disjoint slots are counted separately.
  std::vector<Condition> parts;
  if (f.kind() == Condition::Kind::And) {
    parts = f.parts();
  } else {
    parts = {f};
  }
  std::vector<std::set<int>> part_vars;
  for (const auto& p : parts) part_vars.push_back(condition_vars(p));
  std::vector<int> group(parts.size());
  std::iota(group.begin(), group.end(), 0);
  for (std::size_t x = 0; x < parts.size(); ++x) {
    for (std::size_t y = x + 1; y < parts.size(); ++y) {
      if (group[y] == group[x]) continue;
      bool shared = std::any_of(part_vars[x].begin(), part_vars[x].end(),
                                [&](int v) { return part_vars[y].count(v) > 0; });
      if (!shared) continue;
      const int from = group[y];
      const int to = group[x];
      for (auto& g : group) {
        if (g == from) g = to;
      }
    }
  }
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t x = 0; x < parts.size(); ++x) groups[group[x]].push_back(x);

  MotClass result(1);
  int used = 0;
  for (const auto& [g, members] : groups) {
    std::vector<Condition> sub;
    std::set<int> vars;
    for (std::size_t x : members) {
      sub.push_back(parts[x]);
      vars.insert(part_vars[x].begin(), part_vars[x].end());
    }
    for (int v : vars) {
      const int j = slot_index(v);
      if (j < -n || j > m - n || slot_coord(v) >= a.dim) {
        throw DomainError("slot " + slot_name(v) + " lies outside the jet window");
      }
    }
    used += static_cast<int>(vars.size());
    result *= FormulaCounter(vars).run(Condition::all(std::move(sub)));
    if (result.is_zero()) return {};
  }
  return result * MotClass::L_pow(total_slots - used);
}

// ------------------------------------------------------------ set algebra

namespace {

Condition zero_slots(int dim, int from, int to) {
  std::vector<Condition> parts;
  for (int i = 0; i < dim; ++i) {
    for (int j = from; j < to; ++j) parts.emplace_back(CoeffEq{i, j, 0});
  }
  return Condition::all(std::move(parts));
}

CoefficientAtom shift_atom(const CoefficientAtom& a, int n) {
  return std::visit(Overloaded{
                        [&](const CoeffEq& x) -> CoefficientAtom { return CoeffEq{x.i, x.j + n, x.c}; },
                        [&](const CoeffNonzero& x) -> CoefficientAtom { return CoeffNonzero{x.i, x.j + n}; },
                        [&](const OrdExact& x) -> CoefficientAtom { return OrdExact{x.i, x.e + n}; },
                        [&](const OrdAtLeast& x) -> CoefficientAtom { return OrdAtLeast{x.i, x.e + n}; },
                        [&](const LinearRelation& x) -> CoefficientAtom {
                          LinearRelation r = x;
                          for (auto& [slot, c] : r.terms) slot.second += n;
                          return r;
                        },
                        [&](const PolyEq& x) -> CoefficientAtom {
                          std::map<int, Poly> ren;
                          for (int v : x.f.variables()) ren.emplace(v, slot(slot_coord(v), slot_index(v) + n));
                          return PolyEq{substitute_all(x.f, ren)};
                        },
                    },
                    a);
}

}  // namespace

CylinderSet shift_set(const CylinderSet& a, int n) {
  const int new_bound = std::max(0, a.pole_bound - n);
  Condition shifted = map_atoms(a.condition, [&](const CoefficientAtom& x) { return Condition(shift_atom(x, n)); });
  // Slots the image cannot reach are zero.
  return CylinderSet{a.dim, new_bound, zero_slots(a.dim, -new_bound, n - a.pole_bound) && shifted};
}

CylinderSet rebound(const CylinderSet& a, int pole_bound) {
  if (pole_bound < a.pole_bound) throw DomainError("rebound cannot lower the pole bound");
  if (pole_bound == a.pole_bound) return a;
  return CylinderSet{a.dim, pole_bound, zero_slots(a.dim, -pole_bound, -a.pole_bound) && a.condition};
}

namespace {

void check_dims(const CylinderSet& a, const CylinderSet& b) {
  if (a.dim != b.dim) throw DomainError("sets of different dimensions");
}

}  // namespace

CylinderSet set_union(const CylinderSet& a, const CylinderSet& b) {
  check_dims(a, b);
  const int n = std::max(a.pole_bound, b.pole_bound);
  return CylinderSet{a.dim, n, rebound(a, n).condition || rebound(b, n).condition};
}

CylinderSet set_intersect(const CylinderSet& a, const CylinderSet& b) {
  check_dims(a, b);
  const int n = std::max(a.pole_bound, b.pole_bound);
  return CylinderSet{a.dim, n, rebound(a, n).condition && rebound(b, n).condition};
}

CylinderSet set_difference(const CylinderSet& a, const CylinderSet& b) {
  check_dims(a, b);
  const int n = std::max(a.pole_bound, b.pole_bound);
  return CylinderSet{a.dim, n, rebound(a, n).condition && !rebound(b, n).condition};
}

// ------------------------------------------------------------- membership

namespace {

bool vanishes(const Rational& x, long long p) {
  if (p == 0) return x == 0;
  if (denom(x) % p == 0) throw DomainError("constant with p in its denominator, p = " + std::to_string(p));
  return numer(x) % p == 0;
}

bool eval_condition(const Condition& c, const std::function<bool(const Poly&)>& is_zero_poly) {
  switch (c.kind()) {
    case Condition::Kind::True:
      return true;
    case Condition::Kind::False:
      return false;
    case Condition::Kind::Atom:
      return is_zero_poly(std::get<PolyEq>(c.atom()).f);
    case Condition::Kind::Not:
      return !eval_condition(c.parts().front(), is_zero_poly);
    case Condition::Kind::And:
      for (const auto& p : c.parts()) {
        if (!eval_condition(p, is_zero_poly)) return false;
      }
      return true;
    case Condition::Kind::Or:
      for (const auto& p : c.parts()) {
        if (eval_condition(p, is_zero_poly)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

bool membership(const LaurentVector& point, const CylinderSet& a) {
  if (static_cast<int>(point.size()) != a.dim) throw DomainError("point dimension does not match the set");
  long long p = 0;
  for (const auto& e : point.entries) {
    if (e.characteristic() != 0) p = e.characteristic();
  }
  // Points with deeper poles are outside the pole-bounded ambient space.
  for (const auto& e : point.entries) {
    for (const auto& [j, c] : e.terms()) {
      if (j >= -a.pole_bound) break;
      if (!vanishes(c, p)) return false;
    }
  }
  const Condition f = lower_to_slots(a.condition, a.pole_bound);
  return eval_condition(f, [&](const Poly& poly) {
    Rational value = 0;
    for (const auto& [m, c] : poly.terms()) {
      Rational term = c;
      for (const auto& [v, e] : m) {
        term *= rpow(point[static_cast<std::size_t>(slot_coord(v))].coeff(slot_index(v)), e);
      }
      value += term;
    }
    return vanishes(value, p);
  });
}

CylinderSet translate_set(const CylinderSet& a, const LaurentVector& v) {
  if (static_cast<int>(v.size()) != a.dim) throw DomainError("translation vector dimension does not match the set");
  const int n = std::max(a.pole_bound, v.pole_order());
  // y in A + v iff y - v in A.
  Condition moved = substitute_slots(a.condition, a.pole_bound, [&](int i, int j) {
    return slot(i, j) - Poly(v[static_cast<std::size_t>(i)].coeff(j));
  });
  std::vector<Condition> parts;
  for (int i = 0; i < a.dim; ++i) {
    for (int j = -n; j < -a.pole_bound; ++j) {
      parts.emplace_back(CoeffEq{i, j, v[static_cast<std::size_t>(i)].coeff(j)});
    }
  }
  parts.push_back(moved);
  return CylinderSet{a.dim, n, Condition::all(std::move(parts))};
}

// ---------------------------------------------------- affine ord conditions

Poly affine_coefficient(int i, const LaurentScalar& a, const LaurentScalar& b, int j, int pole_bound) {
  Poly f(a.is_known_zero() ? Rational(0) : a.coeff(j));
  if (b.is_known_zero()) return f;
  const int vb = b.ord();
  for (int jj = -pole_bound; jj <= j - vb; ++jj) {
    const Rational c = b.coeff(j - jj);
    if (c != 0) f += slot(i, jj).scaled(c);
  }
  return f;
}

namespace {

int affine_low(const LaurentScalar& a, const LaurentScalar& b, int pole_bound) {
  int low = kInfiniteOrder;
  if (!a.is_known_zero()) low = a.is_zero_to_precision() ? a.precision() : a.ord();
  if (!b.is_known_zero()) low = std::min(low, b.ord() - pole_bound);
  return low;
}

}  // namespace

Condition ord_affine_at_least(int i, const LaurentScalar& a, const LaurentScalar& b, int o, int pole_bound) {
  std::vector<Condition> parts;
  for (int j = affine_low(a, b, pole_bound); j < o; ++j) {
    parts.push_back(poly_atom(affine_coefficient(i, a, b, j, pole_bound)));
  }
  return Condition::all(std::move(parts));
}

Condition ord_affine_exact(int i, const LaurentScalar& a, const LaurentScalar& b, int o, int pole_bound) {
  return ord_affine_at_least(i, a, b, o, pole_bound) && !poly_atom(affine_coefficient(i, a, b, o, pole_bound));
}

}  // namespace motivic
