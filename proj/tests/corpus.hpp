#pragma once

// Cylinder sets shared by the acceptance checks: d <= 3, pole bound <= 3.

#include "motivic/cylinder.hpp"

#include <vector>

namespace motivic::corpus {

inline const std::vector<const char*>& texts() {
  static const std::vector<const char*> t{
      "ord(x) >= 2",
      "ord(x) == 1",
      "coeff(x,0) == 1",
      "coeff(x,0) != 0 & coeff(x,1) == 2",
      "polebound 1; coeff(x,-1) != 0",
      "polebound 2; ord(x) == -2",
      "polebound 3; coeff(x,-3) == 1 & coeff(x,-1) == 0",
      "polebound 1; ord(x) >= -1 & !(coeff(x,0) == 0)",
      "ord(x) >= 3 | coeff(x,0) == 1",
      "coeff(x,0)*coeff(x,1) == 1",
      "dim 2; ord(x0) >= 1 & ord(x1) >= 0",
      "dim 2; ord(x0) == 0 & coeff(x1,0) == 1",
      "dim 2; coeff(x0,0)*coeff(x1,0) == 1",
      "dim 2; coeff(x0,1) + 2*coeff(x1,0) == 1",
      "dim 2; ord(x0) >= 2 | coeff(x1,1) != 0",
      "dim 2; polebound 1; coeff(x0,-1) != 0 & ord(x1) >= 0",
      "dim 2; polebound 2; ord(x0) == -2 & ord(x1) >= -1",
      "dim 2; polebound 1; coeff(x0,-1) - coeff(x1,0) == 0",
      "dim 2; coeff(x0,0)*coeff(x1,0) + coeff(x0,1) == 0",
      "dim 2; polebound 3; ord(x0) == -3 & ord(x1) >= -1",
      "dim 2; !(ord(x0) >= 1) & ord(x1) >= 1",
      "dim 2; polebound 1; (coeff(x0,-1) == 1 | coeff(x1,-1) == 1) & ord(x0) >= -1 & ord(x1) >= -1",
      "dim 3; ord(x2) == 0",
      "dim 3; ord(x2) == 1",
      "dim 3; ord(x2) == 0 & ord(x1) >= 1",
      "dim 3; polebound 1; ord(x2) == 0 & ord(x0) >= -1",
      "dim 3; ord(x0) >= 1 & ord(x1) >= 1 & ord(x2) == 0",
      "dim 3; polebound 2; ord(x2) == -1 & ord(x0) >= 0 & ord(x1) >= 0",
      "dim 3; polebound 1; ord(x2) == 0 & ord(x1) >= -1 & coeff(x0,0) != 0",
      "dim 3; ord(x2) == 0 & (ord(x0) >= 2 | ord(x1) >= 2)",
      "dim 3; coeff(x0,0) + coeff(x1,0) + coeff(x2,0) == 0",
      "dim 3; ord(x2) == 2 & coeff(x0,0)*coeff(x1,1) == 1",
  };
  return t;
}

inline std::vector<CylinderSet> sets() {
  std::vector<CylinderSet> out;
  for (const char* s : texts()) out.push_back(parse_set(s));
  return out;
}

}  // namespace motivic::corpus
