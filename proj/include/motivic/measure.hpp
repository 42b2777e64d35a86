#pragma once

// Volumes of cylinder sets: the stable measure on arcs, its extension to
// pole-bounded sets through the shift, sigma-sums of pattern families and
// integrals of L^(-ord g) against it.

#include "motivic/cylinder.hpp"
#include "motivic/mot_ring.hpp"
#include "motivic/poly.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace motivic {

/// [pi_m(A)] L^(-m d) at m = stable_level(A). Requires pole bound 0.
MotClass measure_stable(const CylinderSet& a);
/// L^(N d) * measure_stable(S_N(A)) with N the pole bound of A.
MotClass measure_bounded(const CylinderSet& a);
/// The same computed after describing A at the larger pole bound N.
MotClass measure_bounded_at(const CylinderSet& a, int pole_bound);

/// det(t^N Id_d) computed symbolically.
RatFunc shift_jacobian_determinant(int n, int d);
/// ord_t of the Jacobian of x -> t^N x on A^d; checks the determinant is t^(N d).
int shift_jacobian_order(int n, int d);

/// A density g = t^v * prod f_k^(p_k), each f_k a polynomial in the
/// coordinates (coord_var ids) with rational coefficients and t-powers.
struct WeightFactor {
  Poly f;
  int power = 1;
};
struct WeightSpec {
  int t_order = 0;
  std::vector<WeightFactor> factors;

  static WeightSpec one() { return {}; }
  static WeightSpec coordinate(int i, int power = 1);
  /// Splits g into its monomial content (one factor per coordinate) and the rest.
  static WeightSpec from_poly(const Poly& g);
  /// The density g~ with g~(t^N x) = g(x).
  WeightSpec shifted(int n) const;
  std::string to_string() const;
};

struct Stratum {
  std::string label;
  MotClass value;
};
/// Strata with index >= from have measure c * L^(-k index).
struct TailLaw {
  int from = 0;
  MotClass c;
  int k = 1;
};
struct MeasureResult {
  MotClass value;
  std::vector<Stratum> decomposition;
  std::optional<TailLaw> tail;
  std::string to_string() const;
};

/// Sums term(e) over e >= e0. Stops when exhausted(e) reports that nothing
/// lies beyond e, or, from index `check_from` on, when the last `window`
/// terms follow a geometric law c L^(-k e) with k >= 1 (or all vanish).
/// Throws DivergenceError for k <= 0 and PatternMismatchError when no law
/// appears within `slack` further terms.
struct StrataPolicy {
  int check_from = 0;
  int window = 4;
  int slack = 8;
};
MeasureResult sum_strata(const std::function<MotClass(int)>& term, int e0,
                         const std::function<bool(int)>& exhausted, const StrataPolicy& policy,
                         const std::string& label);

struct OrdPartition {
  std::vector<std::pair<int, CylinderSet>> strata;  // (e, {x in A : ord g(x) = e})
  CylinderSet residual;                            // {x in A : ord g(x) > e_max}
};
/// Requires every factor power to be positive.
OrdPartition ord_partition(const WeightSpec& g, const CylinderSet& a, int e_max);

/// Integral of L^(-ord_t g(x)) over A with respect to the measure on A^d((t)).
MeasureResult integrate_weighted(const WeightSpec& g, const CylinderSet& a);
MeasureResult integrate_weighted(const WeightSpec& g, const PatternFamily& f);

/// Compares the integral over A with L^(N d) times the integral of g~ over S_N(A).
bool weighted_shift_consistency(const WeightSpec& g, const CylinderSet& a, int n);

/// Sum of the measures of the strata of F: the declared law is checked on the
/// first four strata and the remainder is summed in closed form.
MeasureResult measure_sigma(const PatternFamily& f);

}  // namespace motivic
