#include "motivic/oracle.hpp"

#include "motivic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace motivic {

bool is_prime(long long q) {
  if (q < 2) return false;
  for (long long d = 2; d * d <= q; ++d) {
    if (q % d == 0) return false;
  }
  return true;
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

long long reduce(const Rational& r, long long q) {
  const long long d = static_cast<long long>(denom(r) % q);
  if (d == 0) throw DomainError("constant " + r.str() + " is not defined modulo " + std::to_string(q));
  long long inv = 1;
  for (long long k = 1; k < q; ++k) {
    if ((d * k) % q == 1) inv = k;
  }
  long long n = static_cast<long long>(numer(r) % q);
  if (n < 0) n += q;
  return (n * inv) % q;
}

// Jet window: coordinate i, index j in [lo, hi].
struct Window {
  int dim;
  int lo;
  int hi;
  int width() const { return hi - lo + 1; }
  int index(int i, int j) const { return i * width() + (j - lo); }
  bool inside(int j) const { return j >= lo && j <= hi; }
};

using Pred = std::function<bool(const std::vector<long long>&)>;

Pred compile(const Condition& c, const Window& w, long long q, std::set<int>& used);

Pred compile_atom(const CoefficientAtom& atom, const Window& w, long long q, std::set<int>& used) {
  auto need = [&](int i, int j) {
    if (!w.inside(j) || i >= w.dim) throw DomainError("atom outside the jet window");
    used.insert(w.index(i, j));
    return w.index(i, j);
  };
  return std::visit(
      Overloaded{
          [&](const CoeffEq& x) -> Pred {
            const long long c = reduce(x.c, q);
            if (x.j < w.lo) return [c](const std::vector<long long>&) { return c == 0; };
            const int k = need(x.i, x.j);
            return [k, c](const std::vector<long long>& a) { return a[static_cast<std::size_t>(k)] == c; };
          },
          [&](const CoeffNonzero& x) -> Pred {
            if (x.j < w.lo) return [](const std::vector<long long>&) { return false; };
            const int k = need(x.i, x.j);
            return [k](const std::vector<long long>& a) { return a[static_cast<std::size_t>(k)] != 0; };
          },
          [&](const OrdAtLeast& x) -> Pred {
            std::vector<int> ks;
            for (int j = w.lo; j < x.e; ++j) ks.push_back(need(x.i, j));
            return [ks](const std::vector<long long>& a) {
              for (int k : ks) {
                if (a[static_cast<std::size_t>(k)] != 0) return false;
              }
              return true;
            };
          },
          [&](const OrdExact& x) -> Pred {
            if (x.e < w.lo) return [](const std::vector<long long>&) { return false; };
            std::vector<int> ks;
            for (int j = w.lo; j < x.e; ++j) ks.push_back(need(x.i, j));
            const int lead = need(x.i, x.e);
            return [ks, lead](const std::vector<long long>& a) {
              for (int k : ks) {
                if (a[static_cast<std::size_t>(k)] != 0) return false;
              }
              return a[static_cast<std::size_t>(lead)] != 0;
            };
          },
          [&](const LinearRelation& x) -> Pred {
            std::vector<std::pair<int, long long>> terms;
            for (const auto& [slot, c] : x.terms) {
              if (slot.second < w.lo) continue;
              terms.emplace_back(need(slot.first, slot.second), reduce(c, q));
            }
            const long long rhs = reduce(x.rhs, q);
            return [terms, rhs, q](const std::vector<long long>& a) {
              long long s = 0;
              for (const auto& [k, c] : terms) s = (s + c * a[static_cast<std::size_t>(k)]) % q;
              return s == rhs;
            };
          },
          [&](const PolyEq& x) -> Pred {
            struct Term {
              long long c;
              std::vector<std::pair<int, int>> powers;
              bool dead;
            };
            std::vector<Term> terms;
            for (const auto& [m, c] : x.f.terms()) {
              Term t{reduce(c, q), {}, false};
              for (const auto& [v, e] : m) {
                if (slot_index(v) < w.lo) {
                  t.dead = true;
                  continue;
                }
                t.powers.emplace_back(need(slot_coord(v), slot_index(v)), e);
              }
              if (!t.dead) terms.push_back(std::move(t));
            }
            return [terms, q](const std::vector<long long>& a) {
              long long s = 0;
              for (const auto& t : terms) {
                long long v = t.c;
                for (const auto& [k, e] : t.powers) {
                  for (int r = 0; r < e; ++r) v = (v * a[static_cast<std::size_t>(k)]) % q;
                }
                s = (s + v) % q;
              }
              return s == 0;
            };
          },
      },
      atom);
}

Pred compile(const Condition& c, const Window& w, long long q, std::set<int>& used) {
  switch (c.kind()) {
    case Condition::Kind::True:
      return [](const std::vector<long long>&) { return true; };
    case Condition::Kind::False:
      return [](const std::vector<long long>&) { return false; };
    case Condition::Kind::Atom:
      return compile_atom(c.atom(), w, q, used);
    case Condition::Kind::Not: {
      Pred inner = compile(c.parts().front(), w, q, used);
      return [inner](const std::vector<long long>& a) { return !inner(a); };
    }
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      std::vector<Pred> parts;
      for (const auto& p : c.parts()) parts.push_back(compile(p, w, q, used));
      const bool conj = c.kind() == Condition::Kind::And;
      return [parts, conj](const std::vector<long long>& a) {
        for (const auto& p : parts) {
          if (p(a) != conj) return !conj;
        }
        return conj;
      };
    }
  }
  return {};
}

}  // namespace

std::int64_t count_jet_points(const CylinderSet& a, int m, long long q) {
  if (!is_prime(q)) throw DomainError("oracle fields are prime fields; q = " + std::to_string(q));
  const Window w{a.dim, -a.pole_bound, m - a.pole_bound};
  std::set<int> used;
  Pred pred = compile(a.condition, w, q, used);
  const int total = a.dim * w.width();
  const int enumerated = static_cast<int>(used.size());
  if (std::pow(static_cast<double>(q), enumerated) > kEnumerationBudget) {
    throw BudgetExceededError("enumeration of " + std::to_string(enumerated) + " coefficients over F_" +
                              std::to_string(q) + " exceeds the budget");
  }
  // Coefficients no atom reads are free and contribute a factor q each.
  std::vector<int> slots(used.begin(), used.end());
  std::vector<long long> point(static_cast<std::size_t>(total), 0);
  std::int64_t hits = 0;
  for (;;) {
    if (pred(point)) ++hits;
    std::size_t k = 0;
    while (k < slots.size()) {
      auto& v = point[static_cast<std::size_t>(slots[k])];
      if (++v < q) break;
      v = 0;
      ++k;
    }
    if (k == slots.size()) break;
  }
  for (int f = enumerated; f < total; ++f) hits *= q;
  return hits;
}

ClassCheck check_class(const CylinderSet& a, int m, long long q) {
  ClassCheck r;
  r.cls = jet_class(a, m);
  r.expected = r.cls.specialize(q);
  r.count = count_jet_points(a, m, q);
  r.ok = r.expected == Rational(r.count);
  return r;
}

namespace {

using Jet = std::vector<long long>;

Jet jet_mul(const Jet& x, const Jet& y, long long q) {
  Jet out(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; i + j < x.size(); ++j) out[i + j] = (out[i + j] + x[i] * y[j]) % q;
  }
  return out;
}

template <class F>
void for_each_jet(int len, long long q, F&& f) {
  Jet j(static_cast<std::size_t>(len), 0);
  for (;;) {
    f(j);
    std::size_t k = 0;
    while (k < j.size()) {
      if (++j[k] < q) break;
      j[k] = 0;
      ++k;
    }
    if (k == j.size()) return;
  }
}

enum class Corner { Any, Unit, Zero };

std::int64_t count_sl2(int m, long long q, Corner corner) {
  if (!is_prime(q)) throw DomainError("oracle fields are prime fields");
  const int len = m + 1;
  if (std::pow(static_cast<double>(q), 4 * len) > kEnumerationBudget) {
    throw BudgetExceededError("SL2 jet enumeration exceeds the budget");
  }
  std::vector<Jet> all;
  for_each_jet(len, q, [&](const Jet& j) { all.push_back(j); });
  Jet one(static_cast<std::size_t>(len), 0);
  one[0] = 1;
  std::int64_t n = 0;
  for (const auto& a : all) {
    if (corner == Corner::Unit && a[0] == 0) continue;
    if (corner == Corner::Zero && std::any_of(a.begin(), a.end(), [](auto v) { return v != 0; })) continue;
    for (const auto& d : all) {
      const Jet ad = jet_mul(a, d, q);
      for (const auto& b : all) {
        for (const auto& c : all) {
          const Jet bc = jet_mul(b, c, q);
          bool ok = true;
          for (std::size_t k = 0; k < ad.size() && ok; ++k) {
            ok = ((ad[k] - bc[k]) % q + q) % q == one[k];
          }
          if (ok) ++n;
        }
      }
    }
  }
  return n;
}

}  // namespace

std::int64_t count_sl2_jets(int m, long long q) { return count_sl2(m, q, Corner::Any); }

std::int64_t count_sl2_big_cell_jets(int m, long long q) { return count_sl2(m, q, Corner::Unit); }

std::int64_t count_sl2_corner_zero_jets(int m, long long q) { return count_sl2(m, q, Corner::Zero); }

}  // namespace motivic
