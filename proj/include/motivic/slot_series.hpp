#pragma once

// Laurent series whose coefficients are polynomials in the slot variables
// a_{i,j}: the generic point of a pole-bounded space, pushed through
// polynomial maps. Coefficient j of g(x) is the polynomial that the
// coefficient conditions on ord_t(g(x)) are built from.

#include "motivic/cylinder.hpp"
#include "motivic/laurent.hpp"
#include "motivic/poly.hpp"

#include <map>
#include <optional>

namespace motivic {

/// Variable id of coordinate x_i in polynomial maps and densities (t is id 0).
inline int coord_var(int i) { return i + 1; }
inline bool is_coord_var(int v) { return v >= 1 && v < 65536; }
inline int var_coord(int v) { return v - 1; }
std::string coord_name(int v);

class SlotSeries {
 public:
  SlotSeries() = default;  // exact zero
  explicit SlotSeries(const Poly& constant);
  /// sum_{j=-N}^{precision-1} a_{i,j} t^j + O(t^precision).
  static SlotSeries coordinate(int i, int pole_bound, int precision);
  static SlotSeries scalar(const LaurentScalar& c);

  int precision() const { return prec_; }
  const std::map<int, Poly>& coeffs() const { return c_; }
  /// Throws IndeterminateError beyond the precision.
  Poly coeff(int j) const;
  /// First index carrying a nonzero coefficient, if any below the precision.
  std::optional<int> low() const;

  SlotSeries operator+(const SlotSeries& o) const;
  SlotSeries operator-(const SlotSeries& o) const;
  SlotSeries operator*(const SlotSeries& o) const;
  SlotSeries t_shift(int n) const;

 private:
  std::map<int, Poly> c_;
  int prec_ = kExact;
};

/// g(x) for g in the coordinate variables (and t), x the generic point of
/// pole bound N whose coordinates are known below `precision`.
SlotSeries eval_series(const Poly& g, int pole_bound, int precision);
/// Coordinate precision that makes eval_series(g, N, .) know coefficient `index`.
int precision_for(const Poly& g, int pole_bound, int index);

/// ord_t(g(x)) >= o, resp. == o, as conditions on the slots (pole bound N).
Condition poly_ord_at_least(const Poly& g, int o, int pole_bound);
Condition poly_ord_exact(const Poly& g, int o, int pole_bound);
/// Smallest order g(x) can have on points of pole bound N.
std::optional<int> poly_ord_floor(const Poly& g, int pole_bound);

}  // namespace motivic
