#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "motivic/biggroup.hpp"
#include "motivic/errors.hpp"
#include "motivic/oracle.hpp"
#include "motivic/slot_series.hpp"

#include <random>

using namespace motivic;

namespace {

MotClass M(const char* s) { return MotClass::parse(s); }
const GroupSpec kSL2 = GroupSpec::sl2();
GroupElement E(const char* s) { return parse_element(s, kSL2); }
RatFunc T(const char* s) { return parse_t_expression(s); }

LaurentScalar random_laurent(std::mt19937& rng, int low, int high, bool unit_leading) {
  std::uniform_int_distribution<int> c(-4, 4);
  std::map<int, Rational> terms;
  for (int j = low; j <= high; ++j) {
    int v = c(rng);
    if (j == low && unit_leading && v == 0) v = 1;
    if (v != 0) terms.emplace(j, v);
  }
  return LaurentScalar(terms);
}

bool same_to_precision(const LaurentScalar& a, const LaurentScalar& b) { return (a - b).is_zero_to_precision(); }

// embed(g0 * extract(u)) evaluated numerically at a point, the independent side of h(u).
LaurentVector pointwise_translate(const GroupElement& g0, const LaurentVector& u, const BigCellChart& chart) {
  const LaurentMatrix g = chart_extract(u, chart);
  LaurentMatrix a;
  for (std::size_t k = 0; k < 4; ++k) a[k] = LaurentScalar::from_ratfunc(g0.entries[k]);
  const LaurentMatrix p{a[0] * g[0] + a[1] * g[2], a[0] * g[1] + a[1] * g[3], a[2] * g[0] + a[3] * g[2],
                        a[2] * g[1] + a[3] * g[3]};
  return chart_embed(p, chart);
}

std::vector<GroupElement> identity_corpus() {
  std::vector<GroupElement> out;
  for (const char* s : {"[[1,0],[0,1]]", "[[2,0],[0,1/2]]", "[[-3,0],[0,-1/3]]", "[[t,0],[0,t^-1]]",
                        "[[t^2,0],[0,t^-2]]", "[[t^3,0],[0,t^-3]]", "[[t^-1,0],[0,t]]", "[[1,1],[0,1]]",
                        "[[1,t^-1],[0,1]]", "[[1,t^-2],[0,1]]", "[[1,1+t^-2],[0,1]]", "[[1,0],[t^-1,1]]",
                        "[[1,0],[t^-2,1]]", "[[1,0],[3+t,1]]", "[[1+t,t^-2],[t^3,*]]", "[[0,1],[-1,0]]",
                        "[[2,t],[*,1]]", "[[t^-1, 1],[-1, 0]]"}) {
    out.push_back(E(s));
  }
  out.push_back(E("[[1,t^-2],[0,1]]") * E("[[1,0],[t^-1,1]]"));
  out.push_back(E("[[t,0],[0,t^-1]]") * E("[[1,1+t],[0,1]]") * E("[[1,0],[t^-2,1]]"));
  out.push_back(E("[[1+t,t^-2],[t^3,*]]") * E("[[0,1],[-1,0]]"));
  return out;
}

}  // namespace

TEST_CASE("group specs and element literals") {
  CHECK(GroupSpec::parse("SL2").dim() == 3);
  CHECK(GroupSpec::parse("G_a^2").dim() == 2);
  CHECK(GroupSpec::parse("Gm^3").dim() == 3);
  CHECK(kSL2.n() == 1);
  CHECK(kSL2.m() == 1);
  CHECK_THROWS_AS(GroupSpec::parse("GL3"), ParseError);

  CHECK(T("1 + t^-2/3") == RatFunc(Poly(1) + Poly::var(0, -2).scaled(Rational(1, 3))));
  CHECK(T("(1+t)^2") == RatFunc(Poly(1) + Poly::var(0).scaled(2) + Poly::var(0, 2)));
  CHECK_THROWS_AS(T("1 +"), ParseError);

  const GroupElement g = E("[[1+t, t^-2],[t^3, *]]");
  CHECK(g.entries[0] * g.entries[3] - g.entries[1] * g.entries[2] == RatFunc(1));
  CHECK(g.entries[3] == (RatFunc(1) + T("t")) / T("1 + t"));
  CHECK_THROWS_AS(E("[[1,1],[1,1]]"), DomainError);
  CHECK_THROWS_AS(E("[[*,1],[1,0]]"), DomainError);
  CHECK(E("[[0,*],[1,0]]").entries[1] == RatFunc(-1));
  CHECK((g * g.inverse()).entries == GroupElement::identity(kSL2).entries);

  const GroupElement v = parse_element("[t^-1, 2]", GroupSpec::additive(2));
  CHECK(v.entries[0] == T("t^-1"));
  CHECK_THROWS_AS(parse_element("[0]", GroupSpec::torus(1)), DomainError);
}

TEST_CASE("SL2 chart: closed forms and round trips") {
  const BigCellChart ref = BigCellChart::reference(kSL2);
  auto mat = [](const GroupElement& g) {
    LaurentMatrix m;
    for (std::size_t k = 0; k < 4; ++k) m[k] = LaurentScalar::from_ratfunc(g.entries[k]);
    return m;
  };
  LaurentVector u = chart_embed(mat(GroupElement::identity(kSL2)), ref);
  CHECK(u[0] == LaurentScalar(0));
  CHECK(u[1] == LaurentScalar(0));
  CHECK(u[2] == LaurentScalar(1));
  u = chart_embed(mat(E("[[t,0],[0,t^-1]]")), ref);
  CHECK(u[0] == LaurentScalar(0));
  CHECK(u[2] == LaurentScalar::t());
  u = chart_embed(mat(E("[[1,0],[t^-1,1]]")), ref);
  CHECK(u[1] == LaurentScalar::monomial(1, -1));
  CHECK(u[2] == LaurentScalar(1));
  CHECK_THROWS_AS(chart_embed(mat(E("[[0,1],[-1,0]]")), ref), NotInBigCellError);

  // det extract == 1 as an identity in x, y, s, for every chart.
  for (const BigCellChart& c : {ref, BigCellChart::swapped(kSL2), BigCellChart::conjugated(E("[[1,1],[0,1]]"))}) {
    const auto& e = c.extract().entries;
    CHECK(e[0] * e[3] - e[1] * e[2] == RatFunc(1));
  }

  std::mt19937 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LaurentScalar a = random_laurent(rng, -2, 3, true);
    const LaurentScalar b = random_laurent(rng, -2, 3, false);
    const LaurentScalar c = random_laurent(rng, -2, 3, false);
    const LaurentScalar d = (LaurentScalar(1) + b * c) * a.inv();
    const LaurentMatrix g{a, b, c, d};
    for (const BigCellChart& chart : {ref, BigCellChart::swapped(kSL2)}) {
      const LaurentMatrix back = chart_extract(chart_embed(g, chart), chart);
      for (std::size_t k = 0; k < 4; ++k) CHECK(same_to_precision(back[k], g[k]));
    }
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("translation maps agree with pointwise translation") {
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const RationalMap id = translation_map(GroupElement::identity(kSL2), ref);
  CHECK(id.delta == Poly(1));
  for (int i = 0; i < 3; ++i) CHECK(id.components[static_cast<std::size_t>(i)] == RatFunc(Poly::var(coord_var(i))));
  CHECK(jacobian_det(id) == RatFunc(1));

  const RationalMap shifted = translation_map(E("[[1,t^-1],[0,1]]"), ref, 1);
  CHECK(shifted.cleared);
  CHECK(shifted.delta.degree_in(coord_var(1)) >= 1);

  // Componentwise x -> t^N x has Jacobian t^(N d).
  for (int n = 1; n <= 3; ++n) {
    std::vector<RatFunc> comps;
    for (int i = 0; i < 3; ++i) comps.emplace_back(Poly::var(0, n) * Poly::var(coord_var(i)));
    CHECK(jacobian_det(RationalMap::from_components(comps)) == RatFunc(Poly::var(0, 3 * n)));
  }

  std::mt19937 rng(5);
  for (const GroupElement& g0 : {E("[[2,0],[0,1/2]]"), E("[[1,t^-1],[0,1]]"), E("[[1+t,t^-2],[t^3,*]]")}) {
    const RationalMap h = translation_map(g0, ref);
    CHECK(h.cleared);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 20; ++trial) {
      LaurentVector u;
      u.entries = {random_laurent(rng, -1, 3, false), random_laurent(rng, -1, 3, false),
                   random_laurent(rng, 0, 3, true)};
      std::map<int, LaurentScalar> at;
      for (std::size_t i = 0; i < 3; ++i) at.emplace(coord_var(static_cast<int>(i)), u[i]);
      LaurentVector direct;
      try {
        direct = pointwise_translate(g0, u, ref);
      } catch (const MotivicError&) {
        continue;
      }
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(same_to_precision(ratfunc_eval(h.components[i], at), direct[i]));
        // The cleared form describes the same map.
        const LaurentScalar num = poly_eval(h.numerators[i], at);
        const LaurentScalar den = poly_eval(h.delta, at);
        CHECK(same_to_precision(num * den.inv(), direct[i]));
      }
      ++checked;
    }
    CHECK(checked == 20);
  }
}

TEST_CASE("invariance identity p(h) det J = p") {
  const auto corpus = identity_corpus();
  CHECK(corpus.size() >= 20);
  for (const auto& g0 : corpus) {
    for (const BigCellChart& chart : {BigCellChart::reference(kSL2), BigCellChart::swapped(kSL2)}) {
      const IdentityReport r = invariance_identity_check(g0, chart);
      CHECK_MESSAGE(r.ok, g0.to_string());
    }
    CHECK(order_identity_on_samples(g0, BigCellChart::reference(kSL2), 5, 2, 3));
  }
  const GroupSpec torus = GroupSpec::torus(2);
  CHECK(invariance_identity_check(parse_element("[t^2, 3]", torus), BigCellChart::reference(torus)).ok);
  const GroupSpec plane = GroupSpec::additive(2);
  CHECK(invariance_identity_check(parse_element("[t^-2, 1]", plane), BigCellChart::reference(plane)).ok);
}

TEST_CASE("Haar measure of big-cell sets") {
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const OmegaSet omega = OmegaSet::arcs_in_big_cell(kSL2);
  const MotClass v = haar_measure(omega, ref).value;
  CHECK(v == M("L^2 * (L - 1)"));
  for (long long q : {2, 3}) CHECK(v.specialize(q) == Rational(count_sl2_big_cell_jets(0, q)));

  // ord s = 1 with x, y integral: weight L^1 on a set of measure (L - 1) L^-1 L^2.
  const OmegaSet s1{parse_set("dim 3; ord(x2) == 1"), ""};
  const MotClass w = haar_measure(s1, ref).value;
  CHECK(w == M("L^2 * (L - 1)"));
  const Rational jets(count_jet_points(s1.chart_part, 1, 3));
  CHECK(w.specialize(3) == Rational(3) * jets / Rational(ipow(3, 3)));

  // Everything inside the complement carries no mass.
  const OmegaSet z{CylinderSet::empty(3), "a = 0"};
  CHECK(haar_measure(z, ref).value.is_zero());

  // The torus and additive charts.
  const GroupSpec gm = GroupSpec::torus(1);
  CHECK(haar_measure(OmegaSet::arcs_in_big_cell(gm), BigCellChart::reference(gm)).value == M("L - 1"));
  const GroupSpec ga = GroupSpec::additive(2);
  CHECK(haar_measure(OmegaSet::arcs_in_big_cell(ga), BigCellChart::reference(ga)).value == M("L^2"));
}

TEST_CASE("left invariance on the big cell") {
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const OmegaSet omega = OmegaSet::arcs_in_big_cell(kSL2);
  const OmegaSet s1{parse_set("dim 3; ord(x2) == 1"), ""};
  const OmegaSet shell{parse_set("dim 3; ord(x2) == 0 & ord(x1) >= 1"), ""};
  const std::vector<std::pair<OmegaSet, const char*>> pairs{
      {omega, "[[1,0],[0,1]]"},    {omega, "[[t,0],[0,t^-1]]"},  {omega, "[[t^-2,0],[0,t^2]]"},
      {omega, "[[2,0],[0,1/2]]"},  {omega, "[[1,1],[0,1]]"},     {omega, "[[1,t],[0,1]]"},
      {omega, "[[1,t^-1],[0,1]]"}, {omega, "[[1,0],[1,1]]"},     {omega, "[[1,0],[t^-1,1]]"},
      {omega, "[[0,1],[-1,0]]"},   {omega, "[[1+t,t^-2],[t^3,*]]"}, {s1, "[[t,0],[0,t^-1]]"},
      {s1, "[[1,t^-1],[0,1]]"},    {shell, "[[1,1],[0,1]]"},     {shell, "[[1,0],[t^-2,1]]"}};
  int fibred = 0;
  for (const auto& [a, g] : pairs) {
    const InvarianceReport r = invariance_check(a, E(g), ref);
    CHECK_MESSAGE(r.ok, g, " ", r.left.to_string(), " vs ", r.right.to_string());
    if (r.route == "fibred") ++fibred;
  }
  CHECK(fibred >= 5);

  // Unipotent translate of the big-cell arcs: strata of the denominator 1 + y
  // contribute (L - 1)^2 L^(1 - n) for n >= 1, a geometric tail.
  const RationalMap h = translation_map(E("[[1,1],[0,1]]"), ref);
  const MeasureResult r = preimage_measure(h, omega.chart_part, ref.weight());
  CHECK(r.value == M("L^2 * (L - 1)"));
  CHECK(r.tail.has_value());

  const GroupSpec ga = GroupSpec::additive(2);
  const OmegaSet plane{parse_set("dim 2; polebound 1; ord(x0) >= -1 & coeff(x1, 0) == 1"), ""};
  CHECK(invariance_check(plane, parse_element("[t^-3 + 2, t^-1]", ga), BigCellChart::reference(ga)).ok);
  const GroupSpec gm = GroupSpec::torus(1);
  const OmegaSet units{parse_set("ord(x) == 2"), ""};
  CHECK(invariance_check(units, parse_element("[t^-1]", gm), BigCellChart::reference(gm)).ok);
}

TEST_CASE("pole strata") {
  const PoleStrata b0 = pole_stratify(OmegaSet::arcs_in_big_cell(kSL2));
  REQUIRE(b0.strata.size() == 1);
  CHECK(b0.strata[0].first == 0);
  CHECK_FALSE(b0.infinity_tag);

  const PoleStrata coset = pole_stratify(OmegaSet{parse_set("polebound 1; coeff(x,-1) == 1"), ""});
  REQUIRE(coset.strata.size() == 1);
  CHECK(coset.strata[0].first == 1);

  // diag(t^-2, t^2) L(Omega): x' = t^-4 x, y' = t^4 y, s' = t^-2 s.
  const OmegaSet image{parse_set("dim 3; polebound 4; ord(x0) >= -4 & ord(x1) >= 4 & ord(x2) == -2"), "a = 0"};
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const PoleStrata p = pole_stratify(image);
  CHECK(p.infinity_tag);
  MotClass total;
  for (const auto& [n, s] : p.strata) {
    CHECK(n >= 2);
    total += haar_measure(OmegaSet{s, ""}, ref).value;
  }
  CHECK(p.strata.size() == 3);
  CHECK(total == haar_measure(image, ref).value);
  CHECK(total == M("L^2 * (L - 1)"));

  CHECK(complement_dimension_drop(2, 2));
}

TEST_CASE("chart independence") {
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const std::vector<OmegaSet> sets{OmegaSet::arcs_in_big_cell(kSL2), OmegaSet{parse_set("dim 3; ord(x2) == 1"), ""},
                                   OmegaSet{parse_set("dim 3; polebound 1; ord(x2) == 0 & ord(x0) >= -1"), ""},
                                   OmegaSet{CylinderSet::empty(3), "a = 0"}};
  const std::vector<BigCellChart> others{BigCellChart::swapped(kSL2), BigCellChart::conjugated(E("[[1,1],[0,1]]")),
                                         BigCellChart::conjugated(E("[[t,0],[0,t^-1]]"))};
  for (const auto& a : sets) {
    for (const auto& c : others) {
      const ChartReport r = chart_independence_check(a, ref, c);
      CHECK_MESSAGE(r.ok, c.to_string(), ": ", r.first.to_string(), " vs ", r.second.to_string());
    }
  }
  CHECK(chart_independence_check(sets[0], ref, others[0]).second == M("L^2 * (L - 1)"));
}

TEST_CASE("restriction to arcs of SL2") {
  CHECK(count_sl2_jets(0, 2) == 6);
  CHECK(count_sl2_jets(1, 2) == 48);
  CHECK(count_sl2_jets(0, 3) == 24);
  const RestrictionReport r = canonical_restriction_check({{0, 2}, {1, 2}, {2, 2}, {0, 3}, {1, 3}}, {2, 3});
  for (const auto& row : r.rows) CHECK_MESSAGE(row.ok, row.m, " ", row.q);
  CHECK(r.big_cell_arcs == M("L^2 * (L - 1)"));
  CHECK(r.decomposed_total == M("L^3 - L"));
  CHECK(r.ok);

  // Each stratum ord a = e >= 1 of L(SL2) has weighted measure (L - 1)^2 L^(1 - e).
  const BigCellChart ref = BigCellChart::reference(kSL2);
  for (int e = 1; e <= 3; ++e) {
    CHECK(haar_measure(OmegaSet{integral_stratum(e), ""}, ref).value == M("(L - 1)^2") * MotClass::L_pow(1 - e));
  }
  // Jet count of the e = 1 stratum at q = 3 against its class.
  CHECK(check_class(integral_stratum(1), 2, 3).ok);
}

TEST_CASE("coefficient and coupled conditions through the fibred route") {
  const BigCellChart ref = BigCellChart::reference(kSL2);
  const std::vector<OmegaSet> sets{
      OmegaSet{parse_set("dim 3; ord(x2) == 0 & coeff(x1,0) == 1"), ""},
      OmegaSet{parse_set("dim 3; coeff(x2,0) == 1 & ord(x0) >= 1"), ""},
      OmegaSet{parse_set("dim 3; ord(x2) == 2 & coeff(x0,0)*coeff(x1,1) == 1"), ""}};
  for (const auto& a : sets) {
    for (const char* g : {"[[1,1],[0,1]]", "[[1,t^-1],[0,1]]", "[[0,1],[-1,0]]"}) {
      const InvarianceReport r = invariance_check(a, E(g), ref);
      CHECK_MESSAGE(r.ok, g, " ", r.left.to_string(), " vs ", r.right.to_string());
      CHECK(r.route == "fibred");
    }
    const ChartReport c = chart_independence_check(a, ref, BigCellChart::conjugated(E("[[1,1],[0,1]]")));
    CHECK_MESSAGE(c.ok, c.first.to_string(), " vs ", c.second.to_string());
  }
  // Sum of constant terms vanishing: strata of ord(s) grow without bound.
  const OmegaSet relation{parse_set("dim 3; coeff(x0,0) + coeff(x1,0) + coeff(x2,0) == 0"), ""};
  CHECK_THROWS_AS(haar_measure(relation, ref), DivergenceError);
}
