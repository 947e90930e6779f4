#pragma once

#include <stdexcept>
#include <utility>

#include "cubesum/arith.hpp"

namespace cubesum {
namespace smallexp {

struct DivisionByZero : std::domain_error {
    using std::domain_error::domain_error;
};

// A progression (x-r, x, x+r) whose cube sum is a perfect square.
struct ProgressionSquare {
    Int x, r, y; // (x-r)^3 + x^3 + (x+r)^3 = y^2
};

// Two-parameter family of square cases:
//   x = 24 a^2 b^2,  r = 9 a^4 - 8 b^4,  y = 12 a b (9 a^4 + 8 b^4).
// The identity is verified exactly before returning.
ProgressionSquare family_p2(const Int& a, const Int& b);

// Does 3x(x^2 + 2r^2) equal y^3?
bool p3_check(const Int& x, const Int& r, const Int& y);

// For a cube case, the rational point (6y/x^3, -36r/x^2) lies on
// Y^2 = X^3 - 648.  Requires p3_check(x, r, y) and x != 0.
std::pair<mpq_class, mpq_class> p3_map(const Int& x, const Int& r, const Int& y);

} // namespace smallexp
} // namespace cubesum
