#pragma once

// Cylinder sets in A^d((t)): constraints on finitely many coefficients of the
// coordinates, their jet classes, Boolean operations and the shift x -> t^N x.
//
// A point with pole bound N has coordinates x_i = sum_{j >= -N} a_{i,j} t^j.

#include "motivic/laurent.hpp"
#include "motivic/mot_ring.hpp"
#include "motivic/poly.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace motivic {

/// Variable id of the coefficient a_{i,j} in polynomial constraints.
int slot_var(int i, int j);
bool is_slot_var(int v);
int slot_coord(int v);
int slot_index(int v);
std::string slot_name(int v);

struct CoeffEq {
  int i;
  int j;
  Rational c;
  bool operator==(const CoeffEq&) const = default;
};
struct CoeffNonzero {
  int i;
  int j;
  bool operator==(const CoeffNonzero&) const = default;
};
struct OrdExact {
  int i;
  int e;
  bool operator==(const OrdExact&) const = default;
};
struct OrdAtLeast {
  int i;
  int e;
  bool operator==(const OrdAtLeast&) const = default;
};
/// sum c_k a_{i_k, j_k} = rhs.
struct LinearRelation {
  std::vector<std::pair<std::pair<int, int>, Rational>> terms;
  Rational rhs;
  bool operator==(const LinearRelation&) const = default;
};
/// f(a) = 0 for a polynomial f in slot variables.
struct PolyEq {
  Poly f;
  bool operator==(const PolyEq&) const = default;
};

using CoefficientAtom = std::variant<CoeffEq, CoeffNonzero, OrdExact, OrdAtLeast, LinearRelation, PolyEq>;

/// Boolean combination of atoms.
class Condition {
 public:
  enum class Kind { True, False, Atom, And, Or, Not };

  Condition() = default;  // true
  Condition(CoefficientAtom a);  // NOLINT
  template <class A>
    requires(!std::is_same_v<std::decay_t<A>, CoefficientAtom> && std::is_constructible_v<CoefficientAtom, A>)
  Condition(A a) : Condition(CoefficientAtom(std::move(a))) {}  // NOLINT
  static Condition truth() { return {}; }
  static Condition falsity();
  static Condition all(std::vector<Condition> parts);
  static Condition any(std::vector<Condition> parts);
  Condition operator!() const;
  Condition operator&&(const Condition& o) const { return all({*this, o}); }
  Condition operator||(const Condition& o) const { return any({*this, o}); }

  Kind kind() const { return kind_; }
  const CoefficientAtom& atom() const { return *atom_; }
  const std::vector<Condition>& parts() const { return parts_; }

  /// Largest coefficient index referenced; nullopt when no index is.
  std::optional<int> max_index() const;
  std::optional<int> min_index() const;
  int max_coord() const;  // -1 when no coordinate is referenced
  std::string to_string() const;

 private:
  Kind kind_ = Kind::True;
  std::shared_ptr<const CoefficientAtom> atom_;
  std::vector<Condition> parts_;
};

struct CylinderSet {
  int dim = 1;
  int pole_bound = 0;
  Condition condition;

  static CylinderSet full(int dim, int pole_bound = 0);
  static CylinderSet empty(int dim);
  /// Index of the last coefficient the condition can see, in shifted coordinates.
  int level() const;
  std::string to_string() const;
};

int stable_level(const CylinderSet& a);

/// [pi_m(A)]: class of the image of A in the jet space of level m after moving
/// the pole bound to 0, i.e. of the coefficient tuples a_{i,j}, -N <= j <= m - N.
MotClass jet_class(const CylinderSet& a, int m);

/// Image under x -> t^N x.
CylinderSet shift_set(const CylinderSet& a, int n);
/// The same set described at a larger pole bound.
CylinderSet rebound(const CylinderSet& a, int pole_bound);

CylinderSet set_union(const CylinderSet& a, const CylinderSet& b);
CylinderSet set_intersect(const CylinderSet& a, const CylinderSet& b);
CylinderSet set_difference(const CylinderSet& a, const CylinderSet& b);

bool membership(const LaurentVector& point, const CylinderSet& a);
/// The translate A + v.
CylinderSet translate_set(const CylinderSet& a, const LaurentVector& v);

/// Rewrites ord atoms into coefficient equations so that every atom mentions slots only.
Condition lower_to_slots(const Condition& c, int pole_bound);
/// Replaces every slot a_{i,j} (j >= -pole_bound) by a polynomial in slot variables.
Condition substitute_slots(const Condition& c, int pole_bound,
                           const std::function<Poly(int i, int j)>& slot_value);

/// Coefficient j of a + b * x_i as a polynomial in the slots of x_i (pole bound n).
Poly affine_coefficient(int i, const LaurentScalar& a, const LaurentScalar& b, int j, int pole_bound);
/// ord_t(a + b x_i) >= o, resp. == o.
Condition ord_affine_at_least(int i, const LaurentScalar& a, const LaurentScalar& b, int o, int pole_bound);
Condition ord_affine_exact(int i, const LaurentScalar& a, const LaurentScalar& b, int o, int pole_bound);

/// A family of disjoint strata whose measures follow c * L^(-k e).
struct PatternFamily {
  std::function<CylinderSet(int)> generator;
  int e0 = 0;
  MotClass c;
  int k = 1;
  std::string description;
};

/// Parses the set grammar: optional `dim d` / `polebound N` headers, then a condition.
CylinderSet parse_set(const std::string& text);
Condition parse_condition(const std::string& text);

}  // namespace motivic
