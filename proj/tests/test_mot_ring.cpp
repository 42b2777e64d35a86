#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "motivic/errors.hpp"
#include "motivic/mot_ring.hpp"

using namespace motivic;

namespace {

MotClass P(const char* s) { return MotClass::parse(s); }

// Independent reference: evaluate the class at q by floating arithmetic on the
// textual form is too lossy, so compare with exact rational evaluation of the
// defining fraction instead.
Rational frac_at(long long q, const std::vector<long long>& num, int low, const std::vector<int>& den_b) {
  Rational x = 0;
  Rational qq(q);
  for (std::size_t i = 0; i < num.size(); ++i) x += Rational(num[i]) * rpow(qq, low + static_cast<int>(i));
  for (int b : den_b) x /= rpow(qq, b) - 1;
  return x;
}

}  // namespace

TEST_CASE("ring identities") {
  CHECK(P("(L - 1) + 1") == MotClass::L());
  CHECK(P("L/(L-1) + (-1)/(L-1)") == MotClass(1));
  CHECK(P("(L^2 - 1)/(L - 1)") == P("L + 1"));
  CHECK(P("L^3 - L") == P("L*(L-1)*(L+1)"));
  CHECK(P("1/(L-1) - 1/(L^2-1)") == P("L/(L^2-1)"));
  CHECK(P("L^-2 * L^2") == MotClass(1));
  CHECK((P("L - 1") * P("1/(L-1)")) == MotClass(1));
  CHECK(P("0 * L") .is_zero());
}

TEST_CASE("canonical form is unique") {
  MotClass a = P("(L^2 + L + 1)/(L^3 - 1)");
  MotClass b = P("1/(L - 1)");
  CHECK(a == b);
  CHECK(a.cyclotomic_exponents() == b.cyclotomic_exponents());
}

TEST_CASE("virtual dimension") {
  for (int n = 0; n < 5; ++n) {
    CHECK(((P("L - 1") * MotClass::L_pow(-n)).vdim()) == 1 - n);
  }
  CHECK(P("L/(L-1)").vdim() == 0);
  CHECK(P("1/(L^2-1)").vdim() == -2);
  CHECK_FALSE(MotClass().vdim().has_value());
  CHECK(P("L^3 - L").norm() == 8);
  CHECK(MotClass().norm() == 0);
}

TEST_CASE("expansion in L^-1 matches long division") {
  TruncatedSeries s = P("L/(L-1)").expand(-3);
  CHECK(s.terms == std::map<int, Integer>{{0, 1}, {-1, 1}, {-2, 1}});
  CHECK(P("1/(L-1)").expand(0).terms.empty());
  // L^2 (L-1) / (L^2-1) = L^2/(L+1) = L - 1 + L^-1 - L^-2 + ...
  TruncatedSeries t = P("L^2*(L-1)/(L^2-1)").expand(-4);
  CHECK(t.terms == std::map<int, Integer>{{1, 1}, {0, -1}, {-1, 1}, {-2, -1}, {-3, 1}});
  CHECK(t.truncate(-1).terms == std::map<int, Integer>{{1, 1}, {0, -1}});
}

TEST_CASE("geometric sums") {
  CHECK(geometric_sum(P("L - 1"), 1, 0) == MotClass::L());
  CHECK(geometric_sum(1, 2, 1) == P("1/(L^2-1)"));
  CHECK_THROWS_AS(geometric_sum(1, 0, 0), DivergenceError);
  CHECK_THROWS_AS(geometric_sum(1, -1, 0), DivergenceError);
  // Partial sums converge to the closed form in the filtration.
  MotClass closed = geometric_sum(P("L^2"), 3, 2);
  MotClass partial;
  for (int n = 2; n < 12; ++n) partial += P("L^2") * MotClass::L_pow(-3 * n);
  CHECK((closed - partial).vdim().value() < -30);
}

TEST_CASE("specialization") {
  CHECK(P("L^3 - L").specialize(5) == 120);
  CHECK(P("L/(L-1)").specialize(2) == 2);
  CHECK(P("1/(L^2-1)").specialize(3) == Rational(1, 8));
  CHECK(P("(L^4 + 2*L^-1)/((L-1)*(L^3-1))").specialize(7) == frac_at(7, {2, 0, 0, 0, 0, 1}, -1, {1, 3}));
  CHECK_THROWS_AS(P("L").specialize(1), DomainError);
}

TEST_CASE("rendering round trips") {
  for (const char* s : {"L^-2", "L^3 - L", "L^2 + 3*L^-1", "L/(L-1)", "(L^2 - L + 1)/(L^3-1)",
                        "1/((L-1)^2*(L^2-1))", "-7", "0"}) {
    MotClass x = P(s);
    CAPTURE(s);
    CAPTURE(x.to_string());
    CHECK(P(x.to_string().c_str()) == x);
  }
  CHECK(P("L^3 - L").to_string() == "L^3 - L");
  CHECK(P("L^-2").to_string() == "L^-2");
  CHECK(P("L/(L-1)").to_string() == "L / (L - 1)");
  CHECK(P("1/((L-1)*(L^2-1))").to_string() == "1 / ((L^2 - 1) * (L - 1))");
}

TEST_CASE("parse errors and non-units") {
  CHECK_THROWS_AS(P("L +"), ParseError);
  CHECK_THROWS_AS(P("1/(L-2)"), DomainError);
  CHECK_THROWS_AS(P("1/0"), DomainError);
}
