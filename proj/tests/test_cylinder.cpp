#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "motivic/class_count.hpp"
#include "motivic/cylinder.hpp"
#include "motivic/errors.hpp"
#include "motivic/oracle.hpp"

using namespace motivic;

namespace {

MotClass M(const char* s) { return MotClass::parse(s); }
CylinderSet S(const char* s) { return parse_set(s); }

CylinderSet ball(int n) { return CylinderSet{1, 0, OrdAtLeast{0, n}}; }

LaurentVector vec(std::initializer_list<const char*> xs) {
  LaurentVector v;
  for (const char* x : xs) v.entries.push_back(LaurentScalar::parse(x));
  return v;
}

}  // namespace

TEST_CASE("elimination counter on small systems") {
  const int x = 1;
  const int y = 2;
  const Poly X = Poly::var(x);
  const Poly Y = Poly::var(y);
  CHECK(count_class({}, {}, {x, y}) == M("L^2"));
  CHECK(count_class({X * Y - 1}, {}, {x, y}) == M("L - 1"));
  CHECK(count_class({X * Y}, {}, {x, y}) == M("2*L - 1"));
  CHECK(count_class({}, {X, Y}, {x, y}) == M("(L-1)^2"));
  CHECK(count_class({X - 1, X - 2}, {}, {x}) == MotClass());
  CHECK_THROWS_AS(count_class({X * X - 2}, {}, {x}), UnsupportedConstraintError);
}

TEST_CASE("jet classes") {
  CHECK(jet_class(CylinderSet{1, 0, OrdExact{0, 2}}, 2) == M("L - 1"));
  CHECK(jet_class(CylinderSet::full(1), 0) == M("L"));
  CHECK(jet_class(S("dim 2; ord(x0) >= 1 & coeff(x1, 0) != 0"), 1) == M("(L-1)*L^2"));
  CHECK(jet_class(ball(2), 2) == M("L"));
  CHECK(jet_class(S("dim 1; ord(x) == 0 | ord(x) == 1"), 1) == M("(L-1)*L + (L-1)"));
  CHECK_THROWS_AS(jet_class(ball(3), 1), DomainError);
}

TEST_CASE("stable levels") {
  for (int n = 1; n <= 5; ++n) CHECK(stable_level(ball(n)) == n - 1);
  CHECK(stable_level(CylinderSet::full(3)) == 0);
  CHECK(stable_level(CylinderSet{1, 0, CoeffEq{0, 3, 5}}) == 3);
}

TEST_CASE("jet class is compatible across levels") {
  for (const char* text : {"dim 2; ord(x0) >= 1 & coeff(x1, 0) != 0", "dim 1; polebound 1; ord(x) == -1",
                           "dim 2; coeff(x0,0)*coeff(x1,0) == 1", "dim 2; coeff(x0, 1) + coeff(x1, 0) == 2 | ord(x1) >= 2"}) {
    CylinderSet a = S(text);
    const int m0 = stable_level(a);
    for (int m = m0; m < m0 + 3; ++m) {
      CAPTURE(text);
      CHECK(jet_class(a, m + 1) == jet_class(a, m) * MotClass::L_pow(a.dim));
    }
  }
}

TEST_CASE("shift") {
  CylinderSet a{1, 2, OrdAtLeast{0, -2}};
  CylinderSet s = shift_set(a, 2);
  CHECK(s.pole_bound == 0);
  CHECK(jet_class(s, 0) == jet_class(CylinderSet::full(1), 0));
  CylinderSet b = shift_set(ball(3), 1);
  CHECK(jet_class(b, 3) == jet_class(ball(4), 3));
  CylinderSet c = shift_set(CylinderSet{1, 1, CoeffNonzero{0, -1}}, 1);
  CHECK(jet_class(c, 0) == jet_class(CylinderSet{1, 0, CoeffNonzero{0, 0}}, 0));
  // membership(g, A) iff membership(t^N g, S_N(A))
  CylinderSet d = S("dim 2; polebound 1; ord(x0) == -1 & coeff(x1, 0) == 2");
  for (auto pt : {vec({"t^-1 + 3", "2 + t"}), vec({"t", "2"}), vec({"t^-1", "1"})}) {
    CHECK(membership(pt, d) == membership(pt.t_shift(1), shift_set(d, 1)));
  }
}

TEST_CASE("boolean operations") {
  CylinderSet full = CylinderSet::full(1);
  CHECK(jet_class(set_union(ball(1), set_difference(full, ball(1))), 0) == M("L"));
  CHECK(jet_class(set_difference(ball(2), ball(3)), 2) == jet_class(CylinderSet{1, 0, OrdExact{0, 2}}, 2));
  CHECK(jet_class(set_intersect(ball(1), ball(2)), 1) == jet_class(ball(2), 1));
}

TEST_CASE("membership") {
  CHECK(membership(vec({"t^3"}), CylinderSet{1, 0, OrdAtLeast{0, 2}}));
  CHECK_FALSE(membership(vec({"1 + t"}), ball(1)));
  CHECK_FALSE(membership(vec({"1 + O(t^2)"}), ball(3)));
  CHECK(membership(vec({"t^-1"}), CylinderSet{1, 1, CoeffNonzero{0, -1}}));
  CHECK_FALSE(membership(vec({"t^-2"}), CylinderSet::full(1, 1)));
  CHECK_THROWS_AS(membership(vec({"O(t^2)"}), ball(3)), IndeterminateError);
}

TEST_CASE("translation keeps the class") {
  CylinderSet a = S("dim 2; polebound 1; ord(x0) >= 0 & coeff(x1, 1) != 0");
  CylinderSet b = translate_set(a, vec({"2*t^-2 + 1", "t^-1 - t"}));
  CHECK(b.pole_bound == 2);
  const int m = std::max(stable_level(a), stable_level(b));
  CHECK(jet_class(b, m) * MotClass::L_pow(-a.dim) == jet_class(rebound(a, 2), m) * MotClass::L_pow(-a.dim));
}

TEST_CASE("oracle counts") {
  CHECK(count_jet_points(CylinderSet{1, 0, OrdExact{0, 1}}, 1, 3) == 2);
  CHECK(count_jet_points(CylinderSet::full(1), 2, 2) == 8);
  CHECK(count_jet_points(S("dim 2; coeff(x0,0) != 0 & coeff(x1,0) != 0"), 0, 5) == 16);
  CHECK(check_class(ball(2), 2, 3).ok);
  CHECK(check_class(ball(2), 2, 3).count == 3);
  CHECK(check_class(CylinderSet{1, 0, OrdExact{0, 0}}, 0, 2).ok);
  CHECK(check_class(CylinderSet::empty(2), 1, 5).ok);
  CHECK(count_sl2_jets(0, 2) == 6);
  CHECK(count_sl2_jets(0, 3) == 24);
  CHECK(count_sl2_jets(1, 2) == 48);
}

TEST_CASE("set grammar round trip") {
  for (const char* text :
       {"dim 2; ord(x0) >= 2 & coeff(x1, 0) != 0", "dim 3; polebound 2; ord(s) == -1 | !(coeff(x, -2) == 1/2)",
        "dim 2; 2*coeff(x0, 1) - coeff(x1, 0) == 3", "dim 2; coeff(x0,0)*coeff(x1,1) + 1 == 0", "dim 1; true"}) {
    CylinderSet a = S(text);
    CylinderSet b = S(a.to_string().c_str());
    CAPTURE(a.to_string());
    const int m = stable_level(a);
    CHECK(jet_class(a, m) == jet_class(b, m));
  }
  CHECK_THROWS_AS(S("dim 1; ord(x3) >= 1"), ParseError);
  CHECK_THROWS_AS(S("dim 1; coeff(x0, 0) >= 1"), ParseError);
}
