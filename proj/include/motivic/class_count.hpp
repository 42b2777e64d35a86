#pragma once

// Classes in K_0 of constructible sets cut out by polynomial equations and
// non-vanishing conditions, computed by eliminating variables that occur linearly.

#include "motivic/mot_ring.hpp"
#include "motivic/poly.hpp"

#include <set>
#include <vector>

namespace motivic {

/// Class of {a in A^vars : f(a) = 0 for f in eqs, g(a) != 0 for g in neqs}.
/// Every polynomial must only involve variables from `vars`. Throws
/// UnsupportedConstraintError when no variable can be eliminated linearly.
MotClass count_class(const std::vector<Poly>& eqs, const std::vector<Poly>& neqs, const std::set<int>& vars);

}  // namespace motivic
