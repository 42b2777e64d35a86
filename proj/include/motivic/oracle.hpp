#pragma once

// Brute-force point counts over prime fields. Conditions are evaluated atom by
// atom from their definitions, sharing no code with the class computations.

#include "motivic/cylinder.hpp"

#include <cstdint>

namespace motivic {

inline constexpr double kEnumerationBudget = 1e8;

/// Number of jets (a_{i,j}), -N <= j <= m - N, over F_q satisfying the condition.
std::int64_t count_jet_points(const CylinderSet& a, int m, long long q);

struct ClassCheck {
  bool ok = false;
  MotClass cls;
  Rational expected;
  std::int64_t count = 0;
};
/// Compares specialize(jet_class(A, m), q) with the brute-force count.
ClassCheck check_class(const CylinderSet& a, int m, long long q);

/// |SL2(F_q[t]/t^(m+1))| by enumerating all four entries.
std::int64_t count_sl2_jets(int m, long long q);
/// Jets of SL2 over F_q[t]/t^(m+1) whose upper-left entry is a unit.
std::int64_t count_sl2_big_cell_jets(int m, long long q);
/// Jets of SL2 over F_q[t]/t^(m+1) whose upper-left entry vanishes.
std::int64_t count_sl2_corner_zero_jets(int m, long long q);

bool is_prime(long long q);

}  // namespace motivic
