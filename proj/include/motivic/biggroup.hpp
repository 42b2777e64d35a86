#pragma once

// Supported groups (G_a^d, G_m^m, SL2), big-cell charts, translation maps in
// chart coordinates, the invariant measure on G((t)) and its invariance checks.
//
// SL2 reference chart on Omega = U^- x U x T:
//   g = [[a, b], [c, d]]  ->  (x, y, s) = (a b, c / a, a),
//   (x, y, s)  ->  [[s, x / s], [y s, (1 + x y) / s]],
// with invariant density p = 1/s, so the integrand is L^(ord_t s).

#include "motivic/cylinder.hpp"
#include "motivic/laurent.hpp"
#include "motivic/measure.hpp"
#include "motivic/poly.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace motivic {

enum class GroupKind { Additive, Torus, SL2 };

struct GroupSpec {
  GroupKind kind = GroupKind::SL2;
  int rank = 1;  // d for G_a^d, m for G_m^m

  static GroupSpec sl2() { return {GroupKind::SL2, 1}; }
  static GroupSpec additive(int d) { return {GroupKind::Additive, d}; }
  static GroupSpec torus(int m) { return {GroupKind::Torus, m}; }
  int n() const;    // positive roots
  int m() const;    // torus rank
  int dim() const;  // 2 n + m
  std::string to_string() const;
  static GroupSpec parse(const std::string& text);
};

/// Element of G(k(t)) with exact entries: SL2 as (a, b, c, d); G_a^d as the
/// translation vector; G_m^m as the diagonal.
struct GroupElement {
  GroupSpec group;
  std::vector<RatFunc> entries;

  static GroupElement identity(const GroupSpec& g);
  /// Checks a d - b c = 1.
  static GroupElement sl2(const RatFunc& a, const RatFunc& b, const RatFunc& c, const RatFunc& d);
  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;
  std::string to_string() const;
};

/// Expression in t with rational coefficients, e.g. "1 + t^-2/3".
RatFunc parse_t_expression(const std::string& text);
/// Matrix literal "[[1+t, t^-2],[t^3, *]]" (one `*` solved from det = 1), or a
/// vector "[t, 1]" for G_a^d and G_m^m.
GroupElement parse_element(const std::string& text, const GroupSpec& g);

using LaurentMatrix = std::array<LaurentScalar, 4>;

enum class ChartKind { Reference, Swapped, Conjugated };

/// Swapped: (x, y, s) -> (y, x, 1/s) after the reference chart.
/// Conjugated by c: g -> i(c^-1 g c).
struct BigCellChart {
  GroupSpec group;
  ChartKind kind = ChartKind::Reference;
  GroupElement conj;

  static BigCellChart reference(const GroupSpec& g);
  static BigCellChart swapped(const GroupSpec& g);
  static BigCellChart conjugated(const GroupElement& c);

  /// Chart coordinates of a symbolic group element.
  std::vector<RatFunc> embed(const GroupElement& g) const;
  /// The group element (entries in coordinates and t) at the generic chart point.
  GroupElement extract() const;
  /// Density p of the invariant form in chart coordinates.
  RatFunc weight_p() const;
  /// Integrand L^(-ord p) as a weight.
  WeightSpec weight() const;
  std::string to_string() const;
};

LaurentVector chart_embed(const LaurentMatrix& g, const BigCellChart& chart);
LaurentMatrix chart_extract(const LaurentVector& u, const BigCellChart& chart);

/// h_i = numerators[i] / delta, the common cleared form; components keep the reduced fractions.
struct RationalMap {
  std::vector<RatFunc> components;
  std::vector<Poly> numerators;
  Poly delta;
  bool cleared = false;
  int shift = 0;  // M

  static RationalMap from_components(std::vector<RatFunc> components, int shift = 0);
  std::string to_string() const;
};

/// h(x) = i(g0 * i^-1(x)) evaluated at t^-M x, in cleared form.
RationalMap translation_map(const GroupElement& g0, const BigCellChart& chart, int shift = 0);
/// Determinant of the Jacobian matrix of the components.
RatFunc jacobian_det(const RationalMap& h);

struct IdentityReport {
  bool ok = false;
  RatFunc witness;  // p(h) det J - p, normalized
};
/// p(h(x)) det J(x) - p(x) == 0 as a rational function.
IdentityReport invariance_identity_check(const GroupElement& g0, const BigCellChart& chart);

/// A set of group elements: a cylinder set in chart coordinates, plus an
/// optional description of a part inside the complement of the big cell.
struct OmegaSet {
  CylinderSet chart_part;
  std::string complement;  // empty, or a tag for a subset of Z((t))

  static OmegaSet arcs_in_big_cell(const GroupSpec& g);
};

MeasureResult haar_measure(const OmegaSet& b, const BigCellChart& chart);

/// Weighted measure of {x : h(x) in target}, computed from the coefficient
/// conditions the target imposes on h(x). Componentwise affine maps are
/// pulled back directly; otherwise the domain is cut by pole order and by the
/// orders of the denominators, with geometric tails closed in closed form.
MeasureResult preimage_measure(const RationalMap& h, const CylinderSet& target, const WeightSpec& w);

struct InvarianceReport {
  bool ok = false;
  MotClass left;
  MotClass right;
  std::string route;  // "affine", "fibred" or "strata"
  MeasureResult right_detail;
  bool order_identity = true;
};
/// Compares mu(A) with mu(g0^-1 A), both computed from their own descriptions.
InvarianceReport invariance_check(const OmegaSet& a, const GroupElement& g0, const BigCellChart& chart);

/// ord p(h(x)) + ord det J(x) == ord p(x) on sample arcs with poles up to max_pole.
bool order_identity_on_samples(const GroupElement& g0, const BigCellChart& chart, int samples, int max_pole,
                               std::uint64_t seed);

struct PoleStrata {
  std::vector<std::pair<int, CylinderSet>> strata;  // (n, points with largest pole exactly n)
  bool infinity_tag = false;                         // carries measure zero
};
PoleStrata pole_stratify(const OmegaSet& b);
/// Jet counts of the complement locus {a = 0} of SL2 over F_q grow strictly
/// slower than q^(3(m+1)) for m <= max_level.
bool complement_dimension_drop(int max_level, long long q);

struct ChartReport {
  bool ok = false;
  MotClass first;
  MotClass second;
};
/// mu of A described in chart1 against mu of the same group elements described in chart2.
ChartReport chart_independence_check(const OmegaSet& a, const BigCellChart& chart1, const BigCellChart& chart2);

struct RestrictionRow {
  int m = 0;
  long long q = 0;
  Rational expected;
  std::int64_t count = 0;
  bool ok = false;
};
struct RestrictionReport {
  bool ok = false;
  std::vector<RestrictionRow> rows;
  MotClass big_cell_arcs;          // mu of L(Omega)-arcs
  std::vector<RestrictionRow> big_cell_rows;
  MotClass decomposed_total;       // mu of L(Omega) plus the strata ord s = e >= 1 inside L(SL2)
};
RestrictionReport canonical_restriction_check(const std::vector<std::pair<int, long long>>& levels,
                                              const std::vector<long long>& q_list);

/// {g in L(SL2) : ord_t a = e} in reference chart coordinates.
CylinderSet integral_stratum(int e);

}  // namespace motivic
