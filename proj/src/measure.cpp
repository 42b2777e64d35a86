#include "motivic/measure.hpp"

#include "motivic/errors.hpp"
#include "motivic/slot_series.hpp"

#include <algorithm>
#include <sstream>

namespace motivic {

MotClass measure_stable(const CylinderSet& a) {
  if (a.pole_bound != 0) throw DomainError("measure_stable expects a set of arcs (pole bound 0)");
  const int m = stable_level(a);
  return jet_class(a, m) * MotClass::L_pow(-m * a.dim);
}

MotClass measure_bounded(const CylinderSet& a) {
  const int n = a.pole_bound;
  return MotClass::L_pow(n * a.dim) * measure_stable(shift_set(a, n));
}

MotClass measure_bounded_at(const CylinderSet& a, int pole_bound) {
  return measure_bounded(rebound(a, pole_bound));
}

RatFunc shift_jacobian_determinant(int n, int d) {
  std::vector<std::vector<RatFunc>> m(static_cast<std::size_t>(d), std::vector<RatFunc>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = RatFunc(Poly::var(0, n));
  return determinant(m);
}

int shift_jacobian_order(int n, int d) {
  if (d < 1) throw DomainError("dimension must be positive");
  const RatFunc det = shift_jacobian_determinant(n, d);
  if (!det.is_poly() || det.num().terms().size() != 1 || det.num().leading_coeff() != 1) {
    throw MotivicError("shift Jacobian is not a power of t: " + det.to_string());
  }
  const Monomial& m = det.num().leading_monomial();
  if (m.size() > 1 || (m.size() == 1 && m.front().first != 0)) {
    throw MotivicError("shift Jacobian depends on the coordinates: " + det.to_string());
  }
  return mono_exp(m, 0);
}

// ----------------------------------------------------------------- weights

WeightSpec WeightSpec::coordinate(int i, int power) {
  WeightSpec w;
  w.factors.push_back({Poly::var(coord_var(i)), power});
  return w;
}

WeightSpec WeightSpec::from_poly(const Poly& g) {
  if (g.is_zero()) throw DomainError("density must not vanish identically");
  WeightSpec w;
  const Monomial content = g.monomial_content();
  for (const auto& [v, e] : content) {
    if (v == 0) {
      w.t_order = e;
    } else if (is_coord_var(v)) {
      w.factors.push_back({Poly::var(v), e});
    } else {
      throw DomainError("density mentions a non-coordinate variable " + coord_name(v));
    }
  }
  const Poly rest = g.strip_monomial();
  bool coordinate_free = true;
  for (int v : rest.variables()) coordinate_free = coordinate_free && v == 0;
  // A coordinate-free rest has nonzero constant term, hence order 0.
  if (!coordinate_free) w.factors.push_back({rest, 1});
  return w;
}

WeightSpec WeightSpec::shifted(int n) const {
  WeightSpec w;
  w.t_order = t_order;
  for (const auto& f : factors) {
    Poly moved;
    for (const auto& [m, c] : f.f.terms()) {
      int degree = 0;
      for (const auto& [v, e] : m) {
        if (v != 0) degree += e;
      }
      moved += Poly::term(c, degree == 0 ? m : mono_mul(m, Monomial{{0, -n * degree}}));
    }
    w.factors.push_back({moved, f.power});
  }
  return w;
}

std::string WeightSpec::to_string() const {
  std::string out = t_order == 0 ? "" : "t^" + std::to_string(t_order);
  for (const auto& f : factors) {
    if (!out.empty()) out += " * ";
    out += "(" + f.f.to_string(coord_name) + ")";
    if (f.power != 1) out += "^" + std::to_string(f.power);
  }
  return out.empty() ? "1" : out;
}

std::string MeasureResult::to_string() const {
  std::ostringstream out;
  out << value.to_string();
  for (const auto& s : decomposition) out << "\n  " << s.label << ": " << s.value.to_string();
  if (tail) {
    out << "\n  tail from " << tail->from << ": (" << tail->c.to_string() << ") * L^(-" << tail->k << " e)";
  }
  return out.str();
}

// --------------------------------------------------------------- summation

namespace {

struct Law {
  bool zero = false;
  int k = 0;
};

std::optional<Law> geometric_law(const std::vector<MotClass>& t) {
  if (std::all_of(t.begin(), t.end(), [](const MotClass& x) { return x.is_zero(); })) return Law{true, 0};
  if (std::any_of(t.begin(), t.end(), [](const MotClass& x) { return x.is_zero(); })) return std::nullopt;
  const int k = *t[0].vdim() - *t[1].vdim();
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    if (t[j + 1] * MotClass::L_pow(k) != t[j]) return std::nullopt;
  }
  return Law{false, k};
}

}  // namespace

MeasureResult sum_strata(const std::function<MotClass(int)>& term, int e0, const std::function<bool(int)>& exhausted,
                         const StrataPolicy& policy, const std::string& label) {
  MeasureResult r;
  std::vector<MotClass> terms;
  for (int e = e0;; ++e) {
    const MotClass v = term(e);
    terms.push_back(v);
    r.value += v;
    if (!v.is_zero()) r.decomposition.push_back({label + "=" + std::to_string(e), v});
    if (exhausted && exhausted(e)) return r;
    const int w = policy.window;
    if (e < policy.check_from || static_cast<int>(terms.size()) < w) continue;
    const std::vector<MotClass> last(terms.end() - w, terms.end());
    if (auto law = geometric_law(last)) {
      if (law->zero) return r;
      if (law->k <= 0) {
        throw DivergenceError("strata of " + label + " grow like L^(" + std::to_string(-law->k) +
                              " e); the sum does not converge");
      }
      r.tail = TailLaw{e + 1, v * MotClass::L_pow(law->k * e), law->k};
      r.value += geometric_sum(v, law->k, 1);
      return r;
    }
    if (e >= policy.check_from + policy.slack) {
      bool growing = true;
      for (std::size_t j = 0; j + 1 < last.size(); ++j) {
        growing = growing && !last[j].is_zero() && !last[j + 1].is_zero() && *last[j + 1].vdim() >= *last[j].vdim();
      }
      if (growing) throw DivergenceError("strata of " + label + " do not decay");
      throw PatternMismatchError("strata of " + label + " follow no geometric law up to index " + std::to_string(e));
    }
  }
}

// -------------------------------------------------------------- partitions

namespace {

int total_degree(const Poly& f) {
  int d = 0;
  for (const auto& [m, c] : f.terms()) {
    int k = 0;
    for (const auto& [v, e] : m) {
      if (v != 0) k += e;
    }
    d = std::max(d, k);
  }
  return d;
}

std::string factor_label(const WeightFactor& f) { return "ord(" + f.f.to_string(coord_name) + ")"; }

int floor_or_throw(const Poly& f, int pole_bound) {
  auto low = poly_ord_floor(f, pole_bound);
  if (!low) throw DomainError("density factor vanishes identically");
  return *low;
}

}  // namespace

OrdPartition ord_partition(const WeightSpec& g, const CylinderSet& a, int e_max) {
  const int n = a.pole_bound;
  std::vector<int> lows;
  for (const auto& f : g.factors) {
    if (f.power < 1) throw UnsupportedConstraintError("ord_partition needs positive factor powers");
    lows.push_back(floor_or_throw(f.f, n));
  }
  OrdPartition out;
  std::vector<Condition> covered;
  int e_min = g.t_order;
  for (std::size_t k = 0; k < lows.size(); ++k) e_min += g.factors[k].power * lows[k];
  for (int e = e_min; e <= e_max; ++e) {
    std::vector<Condition> pieces;
    std::vector<int> o(lows.size());
    std::function<void(std::size_t, int)> place = [&](std::size_t k, int left) {
      if (k == lows.size()) {
        if (left != 0) return;
        std::vector<Condition> parts;
        for (std::size_t j = 0; j < o.size(); ++j) parts.push_back(poly_ord_exact(g.factors[j].f, o[j], n));
        pieces.push_back(Condition::all(std::move(parts)));
        return;
      }
      int rest_min = 0;
      for (std::size_t j = k + 1; j < lows.size(); ++j) rest_min += g.factors[j].power * lows[j];
      const int p = g.factors[k].power;
      for (int v = lows[k]; p * v + rest_min <= left; ++v) {
        o[k] = v;
        place(k + 1, left - p * v);
      }
    };
    place(0, e - g.t_order);
    Condition stratum = Condition::any(pieces);
    covered.push_back(stratum);
    out.strata.emplace_back(e, CylinderSet{a.dim, n, a.condition && stratum});
  }
  out.residual = CylinderSet{a.dim, n, a.condition && !Condition::any(covered)};
  return out;
}

// -------------------------------------------------------------- integrals

namespace {

class Integrator {
 public:
  Integrator(const WeightSpec& g, int dim, int pole_bound) : g_(g), dim_(dim), n_(pole_bound) {}

  MeasureResult run(const Condition& c) {
    MeasureResult r = level(0, c);
    const MotClass scale = MotClass::L_pow(-g_.t_order);
    r.value *= scale;
    for (auto& s : r.decomposition) s.value *= scale;
    if (r.tail) r.tail->c *= scale;
    return r;
  }

 private:
  MotClass plain(const Condition& c) const { return measure_bounded(CylinderSet{dim_, n_, c}); }

  MeasureResult level(std::size_t k, const Condition& c) {
    if (k == g_.factors.size()) return {plain(c), {}, std::nullopt};
    const WeightFactor& f = g_.factors[k];
    const MotClass total = plain(c);
    if (total.is_zero()) return {};
    MotClass seen;
    auto term = [&](int o) -> MotClass {
      const Condition cell = c && poly_ord_exact(f.f, o, n_);
      const MotClass u = plain(cell);
      seen += u;
      if (u.is_zero()) return {};
      const MotClass inner = k + 1 == g_.factors.size() ? u : level(k + 1, cell).value;
      return inner * MotClass::L_pow(-f.power * o);
    };
    const int low = floor_or_throw(f.f, n_);
    StrataPolicy policy;
    const int reach = std::max(low, c.max_index().value_or(low));
    policy.check_from = reach + policy.window + (total_degree(f.f) - 1) * n_;
    return sum_strata(term, low, [&](int) { return seen == total; }, policy, factor_label(f));
  }

  const WeightSpec& g_;
  int dim_;
  int n_;
};

}  // namespace

MeasureResult integrate_weighted(const WeightSpec& g, const CylinderSet& a) {
  return Integrator(g, a.dim, a.pole_bound).run(a.condition);
}

MeasureResult integrate_weighted(const WeightSpec& g, const PatternFamily& f) {
  StrataPolicy policy;
  policy.check_from = f.e0 + policy.window - 1;
  return sum_strata([&](int e) { return integrate_weighted(g, f.generator(e)).value; }, f.e0, nullptr, policy,
                    f.description.empty() ? "stratum" : f.description);
}

bool weighted_shift_consistency(const WeightSpec& g, const CylinderSet& a, int n) {
  if (n < a.pole_bound) throw DomainError("shift must reach the pole bound of the set");
  const CylinderSet wide = rebound(a, n);
  const MotClass direct = integrate_weighted(g, wide).value;
  const MotClass shifted =
      MotClass::L_pow(n * a.dim) * integrate_weighted(g.shifted(n), shift_set(wide, n)).value;
  return direct == shifted;
}

MeasureResult measure_sigma(const PatternFamily& f) {
  constexpr int kPrefix = 4;
  MeasureResult r;
  for (int e = f.e0; e < f.e0 + kPrefix; ++e) {
    const MotClass m = measure_bounded(f.generator(e));
    const MotClass expected = f.c * MotClass::L_pow(-f.k * e);
    if (m != expected) {
      throw PatternMismatchError("stratum " + std::to_string(e) + " has measure " + m.to_string() +
                                 ", the declared law gives " + expected.to_string());
    }
    r.decomposition.push_back({"e=" + std::to_string(e), m});
    r.value += m;
  }
  if (f.k <= 0) throw DivergenceError("declared law c * L^(" + std::to_string(-f.k) + " e) does not decay");
  r.tail = TailLaw{f.e0 + kPrefix, f.c, f.k};
  r.value += geometric_sum(f.c, f.k, f.e0 + kPrefix);
  return r;
}

}  // namespace motivic
