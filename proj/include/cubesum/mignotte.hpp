#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "cubesum/arith.hpp"
#include "cubesum/casesplit.hpp"

namespace cubesum {
namespace mignotte {

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Upper bound on n for solutions of a*Y^n - b*X^n = c in integers X, Y with
// |X| > 1 (Mignotte's theorem):
//   n <= max{ 3 ln(1.5 c / b),  7400 ln A / ln(1 + ln A / |ln(a/b)|) }
// with A = max{a, b, 3}.  Requires a, b, c > 0 and a != b.
//
// Evaluated in 256-bit floating point with outward rounding, so the returned
// value never undershoots the true bound.
double bound_raw(const Int& a, const Int& b, const Int& c);

// ceil(bound_raw), exact.
Int bound(const Int& a, const Int& b, const Int& c);

// The ternary equation of the case, rescaled to the shape a*Y^p - b*X^p = c
// the bound applies to: case 3 times 9 gives (9, 1, 18 r^2) with X = 9 y1^2,
// case 4 times 3 gives (3, 1, 6 r^2) with X absorbed likewise.  Cases 1-2 are
// closed out elsewhere and have no shape here.
struct BoundShape {
    Int a, b, c;
};
std::optional<BoundShape> bound_shape(Case c, const Int& r);

// Largest r the published cap computation covers for the case.
Int max_r_covered(Case c);

// Prime exponent cap for the sieve scan: p < 24000 for case 3 (valid for all
// r up to 1.55e1697), p < 12000 for case 4 (r up to 2.99e848).  nullopt for
// cases 1-2.  Throws std::domain_error when r_max exceeds the covered range.
std::optional<uint32_t> exponent_cap(Case c, const Int& r_max);

} // namespace mignotte
} // namespace cubesum
