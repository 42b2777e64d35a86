// Acceptance checks: one line per criterion with its runtime against the limit.
// Usage: acceptance [--precision N]

#include "corpus.hpp"

#include "motivic/biggroup.hpp"
#include "motivic/errors.hpp"
#include "motivic/laurent.hpp"
#include "motivic/measure.hpp"
#include "motivic/oracle.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>

using namespace motivic;

namespace {

MotClass M(const char* s) { return MotClass::parse(s); }
const GroupSpec kSL2 = GroupSpec::sl2();
GroupElement E(const std::string& s) { return parse_element(s, kSL2); }

struct Outcome {
  bool ok = true;
  std::string note;
};

// Records the first failure; later ones only count.
struct Tally {
  Outcome out;
  int failures = 0;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (failures++ == 0) out.note = what;
    out.ok = false;
  }
};

Outcome criterion1() {
  Tally t;
  const MotClass whole = measure_stable(CylinderSet::full(1));
  t.expect(whole == M("L"), "measure of L(Ga)");
  for (int n = 1; n <= 10; ++n) {
    const MotClass b = measure_stable(CylinderSet{1, 0, OrdAtLeast{0, n}});
    t.expect(b == MotClass::L_pow(1 - n), "B_" + std::to_string(n));
    t.expect(b == MotClass::L_pow(-n) * whole, "B_" + std::to_string(n) + " vs L^-n mu(L(Ga))");
  }
  t.out.note = t.out.ok ? "B_1..B_10" : t.out.note;
  return t.out;
}

Outcome criterion2() {
  Tally t;
  for (int n = 0; n <= 4; ++n) {
    for (int d = 1; d <= 3; ++d) {
      t.expect(shift_jacobian_order(n, d) == n * d, "order at N=" + std::to_string(n) + " d=" + std::to_string(d));
      t.expect(shift_jacobian_determinant(n, d) == RatFunc(Poly::var(0, n * d)), "determinant");
    }
  }
  if (t.out.ok) t.out.note = "N <= 4, d <= 3";
  return t.out;
}

Outcome criterion3() {
  Tally t;
  const auto sets = corpus::sets();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const MotClass base = measure_bounded(sets[i]);
    for (int k = 1; k <= 3; ++k) {
      t.expect(measure_bounded_at(sets[i], sets[i].pole_bound + k) == base,
               "set " + std::to_string(i) + " at N+" + std::to_string(k));
    }
  }
  if (t.out.ok) t.out.note = std::to_string(sets.size()) + " sets, k = 1..3";
  return t.out;
}

// Random Laurent polynomial with poles of order <= 3, as coefficients and as a literal.
std::pair<std::map<int, Rational>, std::string> random_shift(std::mt19937& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> low(-3, 0);
  std::map<int, Rational> terms;
  std::ostringstream text;
  text << "0";
  for (int j = low(rng); j <= 1; ++j) {
    const int c = coeff(rng);
    if (c == 0) continue;
    terms.emplace(j, c);
    text << " + (" << c << ")*t^" << j;
  }
  return {terms, text.str()};
}

Outcome criterion4() {
  Tally t;
  const auto sets = corpus::sets();
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<std::size_t> pick(0, sets.size() - 1);
  int via_group = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CylinderSet& a = sets[pick(rng)];
    LaurentVector v;
    std::string literal = "[";
    for (int i = 0; i < a.dim; ++i) {
      auto [terms, text] = random_shift(rng);
      v.entries.push_back(LaurentScalar(terms));
      literal += (i ? ", " : "") + text;
    }
    literal += "]";
    const MotClass before = measure_bounded(a);
    if (trial % 2 == 0) {
      t.expect(measure_bounded(translate_set(a, v)) == before, "translate of " + a.to_string() + " by " + literal);
    } else {
      // The same statement through the group machinery: mu(A) against mu(g0^-1 A).
      const GroupSpec g = GroupSpec::additive(a.dim);
      const InvarianceReport r = invariance_check(OmegaSet{a, ""}, parse_element(literal, g), BigCellChart::reference(g));
      t.expect(r.ok && r.left == before, "group translate of " + a.to_string() + " by " + literal);
      ++via_group;
    }
  }
  if (t.out.ok) t.out.note = "100 pairs (" + std::to_string(via_group) + " through the group chart)";
  return t.out;
}

std::vector<GroupElement> identity_corpus() {
  std::vector<GroupElement> out;
  for (const char* s : {"[[1,0],[0,1]]", "[[2,0],[0,1/2]]", "[[-3,0],[0,-1/3]]", "[[t,0],[0,t^-1]]",
                        "[[t^2,0],[0,t^-2]]", "[[t^3,0],[0,t^-3]]", "[[t^-1,0],[0,t]]", "[[t^-3,0],[0,t^3]]",
                        "[[1,1],[0,1]]", "[[1,t^-1],[0,1]]", "[[1,t^-2],[0,1]]", "[[1,1+t^-2],[0,1]]",
                        "[[1,0],[t^-1,1]]", "[[1,0],[t^-2,1]]", "[[1,0],[3+t,1]]", "[[1+t,t^-2],[t^3,*]]",
                        "[[0,1],[-1,0]]", "[[2,t],[*,1]]", "[[t^-1, 1],[-1, 0]]"}) {
    out.push_back(E(s));
  }
  const std::vector<GroupElement> gens{E("[[1,t^-2],[0,1]]"), E("[[1,0],[t^-1,1]]"), E("[[t,0],[0,t^-1]]"),
                                       E("[[1,2+t],[0,1]]"), E("[[0,1],[-1,0]]"), E("[[1,0],[-t^-2,1]]")};
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  for (int k = 0; k < 8; ++k) {
    GroupElement g = gens[pick(rng)];
    for (int j = 0; j < 2 + k % 3; ++j) g = g * gens[pick(rng)];
    out.push_back(g);
  }
  return out;
}

Outcome criterion5() {
  Tally t;
  const auto corpus = identity_corpus();
  for (const auto& g0 : corpus) {
    for (const BigCellChart& chart : {BigCellChart::reference(kSL2), BigCellChart::swapped(kSL2)}) {
      const IdentityReport r = invariance_identity_check(g0, chart);
      t.expect(r.ok, g0.to_string() + " in " + chart.to_string());
    }
  }
  t.expect(corpus.size() >= 20, "corpus too small");
  if (t.out.ok) t.out.note = std::to_string(corpus.size()) + " elements, two charts";
  return t.out;
}

Outcome criterion6() {
  Tally t;
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const OmegaSet omega = OmegaSet::arcs_in_big_cell(kSL2);
  const OmegaSet s1{parse_set("dim 3; ord(x2) == 1"), ""};
  const OmegaSet shell{parse_set("dim 3; ord(x2) == 0 & ord(x1) >= 1"), ""};
  const std::vector<std::pair<OmegaSet, const char*>> pairs{
      {omega, "[[1,0],[0,1]]"},    {omega, "[[t,0],[0,t^-1]]"},    {omega, "[[t^-2,0],[0,t^2]]"},
      {omega, "[[2,0],[0,1/2]]"},  {omega, "[[1,1],[0,1]]"},       {omega, "[[1,t],[0,1]]"},
      {omega, "[[1,t^-1],[0,1]]"}, {omega, "[[1,0],[1,1]]"},       {omega, "[[1,0],[t^-1,1]]"},
      {omega, "[[0,1],[-1,0]]"},   {omega, "[[1+t,t^-2],[t^3,*]]"}, {s1, "[[t,0],[0,t^-1]]"},
      {s1, "[[1,t^-1],[0,1]]"},    {shell, "[[1,1],[0,1]]"},       {shell, "[[1,0],[t^-2,1]]"}};
  int tails = 0;
  for (const auto& [a, g] : pairs) {
    const InvarianceReport r = invariance_check(a, E(g), ref);
    t.expect(r.ok, std::string(g) + ": " + r.left.to_string() + " vs " + r.right.to_string());
    if (r.right_detail.tail) ++tails;
  }
  t.expect(tails >= 1, "no pair needed a geometric tail");
  if (t.out.ok) t.out.note = std::to_string(pairs.size()) + " pairs, " + std::to_string(tails) + " with geometric tails";
  return t.out;
}

Outcome criterion7() {
  Tally t;
  const BigCellChart ref = BigCellChart::reference(kSL2);
  std::vector<OmegaSet> sets{OmegaSet::arcs_in_big_cell(kSL2), OmegaSet{CylinderSet::empty(3), "a = 0"}};
  for (const auto& a : corpus::sets()) {
    if (a.dim == 3) sets.push_back(OmegaSet{a, ""});
  }
  const std::vector<BigCellChart> others{BigCellChart::swapped(kSL2), BigCellChart::conjugated(E("[[1,1],[0,1]]")),
                                         BigCellChart::conjugated(E("[[t,0],[0,t^-1]]"))};
  int compared = 0;
  int divergent = 0;
  for (const auto& a : sets) {
    bool finite = true;
    try {
      haar_measure(a, ref);
    } catch (const DivergenceError&) {
      finite = false;
      ++divergent;
    }
    for (const auto& c : others) {
      const std::string what = a.chart_part.to_string() + " in " + c.to_string();
      if (!finite) {
        // Divergence must not depend on the chart either.
        bool diverges = false;
        try {
          chart_independence_check(a, c, ref);
        } catch (const DivergenceError&) {
          diverges = true;
        }
        t.expect(diverges, what + ": finite in this chart only");
        continue;
      }
      try {
        const ChartReport r = chart_independence_check(a, ref, c);
        t.expect(r.ok, what + ": " + r.first.to_string() + " vs " + r.second.to_string());
      } catch (const MotivicError& e) {
        t.expect(false, what + ": " + e.what());
      }
      ++compared;
    }
  }
  if (t.out.ok) {
    t.out.note = std::to_string(sets.size()) + " sets, " + std::to_string(compared) + " comparisons, " +
                 std::to_string(divergent) + " divergent in every chart";
  }
  return t.out;
}

Outcome criterion8() {
  Tally t;
  const RestrictionReport r = canonical_restriction_check({{0, 2}, {1, 2}, {2, 2}, {0, 3}, {1, 3}}, {2, 3});
  for (const auto& row : r.rows) {
    t.expect(row.ok, "|SL2| at m=" + std::to_string(row.m) + " q=" + std::to_string(row.q));
  }
  const MotClass omega = M("L^2 * (L - 1)");
  t.expect(r.big_cell_arcs == omega, "big-cell arcs " + r.big_cell_arcs.to_string());
  for (long long q : {2, 3}) {
    t.expect(omega.specialize(q) == Rational(count_sl2_big_cell_jets(0, q)), "big-cell count at q=" + std::to_string(q));
    const Rational q2(q * q * (q - 1));
    t.expect(Rational(count_sl2_big_cell_jets(0, q)) == q2, "q^2 (q - 1) at q=" + std::to_string(q));
  }
  t.expect(r.ok, "restriction report");
  if (t.out.ok) t.out.note = std::to_string(r.rows.size()) + " (m, q) rows";
  return t.out;
}

Outcome criterion9() {
  Tally t;
  const auto sets = corpus::sets();
  int checked = 0;
  int skipped = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const int from = stable_level(sets[i]);
    t.expect(from <= 3, "set " + std::to_string(i) + " is stable only from level " + std::to_string(from));
    for (int m = from; m <= 3; ++m) {
      for (long long q : {2, 3, 5}) {
        try {
          const ClassCheck k = check_class(sets[i], m, q);
          t.expect(k.ok, "set " + std::to_string(i) + " m=" + std::to_string(m) + " q=" + std::to_string(q));
          ++checked;
        } catch (const BudgetExceededError&) {
          ++skipped;
        }
      }
    }
  }
  if (t.out.ok) {
    t.out.note = std::to_string(checked) + " counts agree, " + std::to_string(skipped) + " over the enumeration budget";
  }
  return t.out;
}

Outcome criterion10() {
  Tally t;
  const PatternFamily f{[](int e) { return CylinderSet{1, 0, OrdExact{0, e}}; }, 0, M("L - 1"), 1, "ord(x)"};
  const MeasureResult r = measure_sigma(f);
  t.expect(r.value == M("L"), "sigma sum " + r.value.to_string());
  for (int cutoff : {-5, -10, -20}) {
    MotClass partial;
    for (int e = 0; e <= -cutoff + 2; ++e) partial += measure_stable(f.generator(e));
    t.expect(partial.expand(cutoff) == r.value.expand(cutoff), "partial sums at " + std::to_string(cutoff));
  }
  if (t.out.ok) t.out.note = "cutoffs -5, -10, -20";
  return t.out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--precision") == 0 && i + 1 < argc) {
      set_default_precision(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--precision N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<Criterion> criteria{
      {1, "ball volumes", 1, criterion1},
      {2, "shift Jacobian", 1, criterion2},
      {3, "pole-bound independence", 10, criterion3},
      {4, "additive invariance", 30, criterion4},
      {5, "SL2 invariance identity", 60, criterion5},
      {6, "Haar invariance", 120, criterion6},
      {7, "chart independence", 30, criterion7},
      {8, "canonical restriction", 300, criterion8},
      {9, "oracle agreement", 300, criterion9},
      {10, "sigma summation", 1, criterion10},
  };
  std::printf("precision %d\n", default_precision());
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::printf("%s  %2d  %-26s %8.3f s (limit %g s)  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                o.note.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
