#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "motivic/errors.hpp"
#include "motivic/measure.hpp"
#include "motivic/oracle.hpp"
#include "motivic/slot_series.hpp"

using namespace motivic;

namespace {

MotClass M(const char* s) { return MotClass::parse(s); }
CylinderSet S(const char* s) { return parse_set(s); }
CylinderSet ball(int n) { return CylinderSet{1, 0, OrdAtLeast{0, n}}; }

// Order of a jet over F_q; the jet length when it is zero.
int jet_ord(const std::vector<int>& a) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] != 0) return static_cast<int>(j);
  }
  return static_cast<int>(a.size());
}

std::vector<std::vector<int>> all_jets(int len, int q) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(static_cast<std::size_t>(len), 0);
  for (;;) {
    out.push_back(a);
    std::size_t k = 0;
    while (k < a.size() && ++a[k] == q) a[k++] = 0;
    if (k == a.size()) return out;
  }
}

}  // namespace

TEST_CASE("volumes of balls and order strata") {
  const MotClass whole = measure_stable(CylinderSet::full(1));
  CHECK(whole == M("L"));
  for (int n = 1; n <= 10; ++n) {
    CHECK(measure_stable(ball(n)) == MotClass::L_pow(1 - n));
    CHECK(measure_stable(ball(n)) == MotClass::L_pow(-n) * whole);
  }
  for (int n = 0; n <= 3; ++n) {
    const CylinderSet a{1, 0, OrdExact{0, n}};
    const MotClass m = measure_stable(a);
    CHECK(m == M("L - 1") * MotClass::L_pow(-n));
    // Brute force at q = 3: jets of level n, rescaled by q^(-n).
    const Rational count(count_jet_points(a, n, 3));
    CHECK(m.specialize(3) == count / Rational(ipow(3, n)));
  }
  CHECK_THROWS_AS(measure_stable(S("polebound 1; ord(x) >= 0")), DomainError);
}

TEST_CASE("pole-bounded volumes") {
  for (int n = 0; n <= 3; ++n) {
    const CylinderSet full = CylinderSet::full(1, n);
    CHECK(measure_bounded(full) == MotClass::L_pow(n + 1));
    CHECK(measure_bounded_at(full, n + 1) == measure_bounded(full));
  }
  // The coset t^-2 + k[[t]].
  CHECK(measure_bounded(S("polebound 2; coeff(x,-2) == 1 & coeff(x,-1) == 0")) == M("L"));
  for (int d = 1; d <= 3; ++d) {
    CHECK(measure_bounded(CylinderSet::full(d, 2)) == measure_stable(CylinderSet::full(d)) * MotClass::L_pow(2 * d));
  }
}

TEST_CASE("shift Jacobian") {
  for (int n = 0; n <= 4; ++n) {
    for (int d = 1; d <= 3; ++d) {
      CHECK(shift_jacobian_order(n, d) == n * d);
      CHECK(shift_jacobian_determinant(n, d) == RatFunc(Poly::var(0, n * d)));
    }
  }
}

TEST_CASE("series of polynomial maps") {
  const Poly x = Poly::var(coord_var(0));
  const Poly y = Poly::var(coord_var(1));
  CHECK(poly_ord_floor(x * y, 2) == -4);
  CHECK(poly_ord_floor(x * y + Poly::var(0, -7), 2) == -7);
  CHECK(poly_ord_floor(x, 0) == 0);
  const SlotSeries s = eval_series(x * x, 1, 2);
  CHECK(s.coeff(-2) == Poly::var(slot_var(0, -1)).pow(2));
  CHECK_THROWS_AS(s.coeff(s.precision()), IndeterminateError);
}

TEST_CASE("order partition of x*y on the plane") {
  const WeightSpec g = WeightSpec::from_poly(Poly::var(coord_var(0)) * Poly::var(coord_var(1)));
  REQUIRE(g.factors.size() == 2);
  const OrdPartition p = ord_partition(g, CylinderSet::full(2), 2);
  REQUIRE(p.strata.size() == 3);
  for (const auto& [e, a] : p.strata) {
    // Pairs of jets of length e + 1 over F_2 with ord x + ord y = e.
    long long count = 0;
    const auto jets = all_jets(e + 1, 2);
    for (const auto& u : jets) {
      for (const auto& v : jets) {
        if (jet_ord(u) + jet_ord(v) == e) ++count;
      }
    }
    CHECK(jet_class(a, e).specialize(2) == Rational(count));
  }
  // The strata and the residual add up to the plane.
  MotClass total = measure_stable(p.residual);
  for (const auto& [e, a] : p.strata) total += measure_stable(a);
  CHECK(total == M("L^2"));
}

TEST_CASE("weighted integrals") {
  const WeightSpec s = WeightSpec::coordinate(0);
  const CylinderSet units{1, 0, OrdExact{0, 0}};
  MeasureResult r = integrate_weighted(s, units);
  CHECK(r.value == M("L - 1"));
  CHECK(r.decomposition.size() == 1);
  for (int n = 1; n <= 4; ++n) CHECK(integrate_weighted(WeightSpec::one(), ball(n)).value == MotClass::L_pow(1 - n));

  r = integrate_weighted(s, CylinderSet::full(1));
  CHECK(r.value == M("L^2 / (L + 1)"));
  REQUIRE(r.tail.has_value());
  // Partial sums of (L - 1) L^(-2e) agree with the closed form below L^-10.
  MotClass partial;
  for (int e = 0; e <= 8; ++e) partial += M("L - 1") * MotClass::L_pow(-2 * e);
  CHECK(partial.expand(-10) == r.value.expand(-10));

  // Density 1/x on the units of k[[t]] leaves the volume unchanged; on all of k[[t]] it diverges.
  CHECK(integrate_weighted(WeightSpec::coordinate(0, -1), units).value == M("L - 1"));
  CHECK_THROWS_AS(integrate_weighted(WeightSpec::coordinate(0, -1), CylinderSet::full(1)), DivergenceError);

  // Affine factor: ord(1 + x) on integral arcs.
  const WeightSpec shifted_density = WeightSpec::from_poly(Poly(1) + Poly::var(coord_var(0)));
  const MotClass v = integrate_weighted(shifted_density, CylinderSet::full(1)).value;
  CHECK(v == M("L^2 / (L + 1)"));
}

TEST_CASE("weighted shift form") {
  const WeightSpec one = WeightSpec::one();
  CHECK(weighted_shift_consistency(one, S("polebound 1; coeff(x,-1) != 0"), 1));
  CHECK(weighted_shift_consistency(WeightSpec::coordinate(0), S("polebound 1; ord(x) == -1"), 1));
  const WeightSpec xy = WeightSpec::from_poly(Poly::var(coord_var(0)) * Poly::var(coord_var(1)));
  const CylinderSet sample = S("dim 2; polebound 1; ord(x0) == -1 & ord(x1) >= 1");
  CHECK(weighted_shift_consistency(xy, sample, 1));
  CHECK(weighted_shift_consistency(xy, sample, 2));
}

TEST_CASE("sigma sums of pattern families") {
  PatternFamily f{[](int e) { return CylinderSet{1, 0, OrdExact{0, e}}; }, 0, M("L - 1"), 1, "ord(x)"};
  MeasureResult r = measure_sigma(f);
  CHECK(r.value == M("L"));
  for (int cutoff : {-5, -10, -20}) {
    MotClass partial;
    for (int e = 0; e <= -cutoff + 2; ++e) partial += M("L - 1") * MotClass::L_pow(-e);
    CHECK(partial.expand(cutoff) == r.value.expand(cutoff));
  }
  f.e0 = 1;
  CHECK(measure_sigma(f).value == M("1"));

  PatternFamily wrong = f;
  wrong.c = M("L");
  CHECK_THROWS_AS(measure_sigma(wrong), PatternMismatchError);

  PatternFamily poles{[](int e) { return CylinderSet{1, e, OrdExact{0, -e}}; }, 1, M("L - 1"), -1, "pole order"};
  CHECK_THROWS_AS(measure_sigma(poles), DivergenceError);

  CHECK(integrate_weighted(WeightSpec::one(), PatternFamily{f.generator, 0, M("L - 1"), 1, "ord(x)"}).value == M("L"));
}
