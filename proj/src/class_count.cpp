#include "motivic/class_count.hpp"

#include "motivic/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace motivic {

namespace {

constexpr int kMaxDepth = 400;

struct System {
  std::vector<Poly> eqs;
  std::vector<Poly> neqs;
  std::set<int> vars;
};

class Counter {
 public:
  MotClass count(System s, int depth) {
    if (depth > kMaxDepth) throw UnsupportedConstraintError("elimination did not terminate within the depth limit");
    if (!simplify(s)) return {};
    std::string key = fingerprint(s);
    auto hit = memo_.find(key);
    if (hit != memo_.end()) return hit->second;
    MotClass r = count_simplified(std::move(s), depth);
    memo_.emplace(std::move(key), r);
    return r;
  }

 private:
  static void add_unique(std::vector<Poly>& v, const Poly& p) {
    if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(p);
  }

  // Drops trivial constraints; false when the system is visibly inconsistent.
  static bool simplify(System& s) {
    std::vector<Poly> eqs;
    for (const auto& p : s.eqs) {
      if (p.is_zero()) continue;
      if (p.is_constant()) return false;
      add_unique(eqs, p.monic());
    }
    std::vector<Poly> neqs;
    for (const auto& p : s.neqs) {
      if (p.is_zero()) return false;
      if (p.is_constant()) continue;
      const Poly m = p.monic();
      if (std::find(eqs.begin(), eqs.end(), m) != eqs.end()) return false;
      add_unique(neqs, m);
    }
    std::sort(eqs.begin(), eqs.end(), [](const Poly& a, const Poly& b) { return a.to_string() < b.to_string(); });
    std::sort(neqs.begin(), neqs.end(), [](const Poly& a, const Poly& b) { return a.to_string() < b.to_string(); });
    s.eqs = std::move(eqs);
    s.neqs = std::move(neqs);
    return true;
  }

  static std::string fingerprint(const System& s) {
    std::string key = std::to_string(s.vars.size()) + "|";
    for (const auto& p : s.eqs) key += p.to_string() + ";";
    key += "|";
    for (const auto& p : s.neqs) key += p.to_string() + ";";
    return key;
  }

  MotClass count_simplified(System s, int depth) {
    // Variables not mentioned anywhere are free.
    std::set<int> used;
    for (const auto* group : {&s.eqs, &s.neqs}) {
      for (const auto& p : *group) {
        for (int v : p.variables()) used.insert(v);
      }
    }
    for (int v : used) {
      if (!s.vars.count(v)) throw DomainError("constraint mentions an undeclared variable");
    }
    const int free_vars = static_cast<int>(s.vars.size() - used.size());
    const MotClass free_factor = MotClass::L_pow(free_vars);
    s.vars = used;
    if (s.eqs.empty() && s.neqs.empty()) return free_factor;

    auto components = split(s);
    if (components.size() > 1) {
      MotClass r = free_factor;
      for (auto& c : components) {
        r *= count(std::move(c), depth + 1);
        if (r.is_zero()) break;
      }
      return r;
    }
    return free_factor * eliminate(std::move(s), depth);
  }

  static std::vector<System> split(const System& s) {
    std::vector<int> vars(s.vars.begin(), s.vars.end());
    std::map<int, int> index;
    for (std::size_t k = 0; k < vars.size(); ++k) index[vars[k]] = static_cast<int>(k);
    std::vector<int> parent(vars.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      return x;
    };
    auto link = [&](const Poly& p) {
      auto vs = p.variables();
      for (std::size_t k = 1; k < vs.size(); ++k) {
        parent[static_cast<std::size_t>(find(index[vs[k]]))] = find(index[vs[0]]);
      }
    };
    for (const auto& p : s.eqs) link(p);
    for (const auto& p : s.neqs) link(p);
    std::map<int, System> groups;
    for (int v : vars) groups[find(index[v])].vars.insert(v);
    auto owner = [&](const Poly& p) { return find(index[p.variables().front()]); };
    for (const auto& p : s.eqs) groups[owner(p)].eqs.push_back(p);
    for (const auto& p : s.neqs) groups[owner(p)].neqs.push_back(p);
    std::vector<System> out;
    for (auto& [root, g] : groups) out.push_back(std::move(g));
    return out;
  }

  // q(v = -b/a) * a^deg_v(q): same zero set as q on {a != 0}.
  static Poly eliminate_in(const Poly& q, int v, const Poly& a, const Poly& b) {
    if (!q.has_var(v)) return q;
    const int deg = q.degree_in(v);
    Poly out;
    for (const auto& [e, c] : q.coeffs_in(v)) {
      out += c * (-b).pow(static_cast<unsigned>(e)) * a.pow(static_cast<unsigned>(deg - e));
    }
    return out;
  }

  // a is a product of polynomials already required to be nonzero.
  static bool known_nonzero(Poly a, const std::vector<Poly>& neqs) {
    for (bool progress = true; progress && !a.is_constant();) {
      progress = false;
      for (const auto& q : neqs) {
        if (auto r = divide_exact(a, q); r && r->is_polynomial()) {
          a = *r;
          progress = true;
        }
      }
    }
    return a.is_constant();
  }

  MotClass eliminate(System s, int depth) {
    if (s.eqs.empty()) {
      // Inclusion-exclusion on one non-vanishing condition.
      auto it = std::min_element(s.neqs.begin(), s.neqs.end(), [](const Poly& a, const Poly& b) {
        return a.terms().size() < b.terms().size();
      });
      Poly q = *it;
      s.neqs.erase(it);
      System with_zero = s;
      with_zero.eqs.push_back(q);
      return count(s, depth + 1) - count(std::move(with_zero), depth + 1);
    }

    // Prefer an equation linear in some variable with constant coefficient,
    // then one whose coefficient is known to be nonzero.
    int best_eq = -1;
    int best_var = -1;
    int best_rank = -1;
    std::size_t best_size = 0;
    for (std::size_t k = 0; k < s.eqs.size(); ++k) {
      const Poly& p = s.eqs[k];
      for (int v : p.variables()) {
        if (p.degree_in(v) != 1) continue;
        const std::size_t size = p.terms().size();
        if (best_rank == 2 && size >= best_size) continue;
        const Poly a = p.coeffs_in(v).at(1);
        const int rank = a.is_constant() ? 2 : (known_nonzero(a, s.neqs) ? 1 : 0);
        if (rank > best_rank || (rank == best_rank && size < best_size)) {
          best_eq = static_cast<int>(k);
          best_var = v;
          best_rank = rank;
          best_size = size;
        }
      }
    }
    const bool best_const = best_rank >= 1;

    if (best_eq < 0) return eliminate_monomial(std::move(s), depth);

    const Poly p = s.eqs[static_cast<std::size_t>(best_eq)];
    s.eqs.erase(s.eqs.begin() + best_eq);
    auto parts = p.coeffs_in(best_var);
    const Poly a = parts.at(1);
    const Poly b = parts.count(0) ? parts.at(0) : Poly();

    System solved;
    solved.vars = s.vars;
    solved.vars.erase(best_var);
    for (const auto& q : s.eqs) solved.eqs.push_back(eliminate_in(q, best_var, a, b));
    for (const auto& q : s.neqs) solved.neqs.push_back(eliminate_in(q, best_var, a, b));
    if (best_const) {
      if (!a.is_constant()) solved.neqs.push_back(a);
      return count(std::move(solved), depth + 1);
    }

    solved.neqs.push_back(a);
    System degenerate = s;
    degenerate.eqs.push_back(a);
    degenerate.eqs.push_back(b);
    return count(std::move(solved), depth + 1) + count(std::move(degenerate), depth + 1);
  }

  // Equations that are a single monomial: x^k y^l = 0 splits as {x = 0} or {x != 0, y^l = 0}.
  MotClass eliminate_monomial(System s, int depth) {
    for (std::size_t k = 0; k < s.eqs.size(); ++k) {
      const Poly& p = s.eqs[k];
      if (p.terms().size() != 1) continue;
      const Monomial m = p.terms().begin()->first;
      const Poly x = Poly::var(m.front().first);
      Poly rest(1);
      for (std::size_t r = 1; r < m.size(); ++r) rest *= Poly::var(m[r].first, m[r].second);
      System first = s;
      first.eqs[k] = x;
      if (m.size() == 1) return count(std::move(first), depth + 1);
      System second = s;
      second.eqs[k] = rest;
      second.neqs.push_back(x);
      return count(std::move(first), depth + 1) + count(std::move(second), depth + 1);
    }
    // A repeated factor splits the zero set: V(p) = V(g) + (V(p / g) minus V(g)).
    for (std::size_t k = 0; k < s.eqs.size(); ++k) {
      const Poly& p = s.eqs[k];
      for (int v : p.variables()) {
        if (p.degree_in(v) < 2) continue;
        const Poly g = gcd(p, p.derivative(v));
        if (g.is_constant() || g.degree_in(v) == p.degree_in(v)) continue;
        const auto h = divide_exact(p, g);
        if (!h) continue;
        System first = s;
        first.eqs[k] = g;
        System second = s;
        second.eqs[k] = *h;
        second.neqs.push_back(g);
        return count(std::move(first), depth + 1) + count(std::move(second), depth + 1);
      }
    }
    std::string msg = "no variable occurs linearly in the system:";
    for (const auto& p : s.eqs) msg += " " + p.to_string() + " = 0;";
    throw UnsupportedConstraintError(msg);
  }

  std::map<std::string, MotClass> memo_;
};

}  // namespace

MotClass count_class(const std::vector<Poly>& eqs, const std::vector<Poly>& neqs, const std::set<int>& vars) {
  Counter counter;
  return counter.count(System{eqs, neqs, vars}, 0);
}

}  // namespace motivic
