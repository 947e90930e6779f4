#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubesum/casesplit.hpp"

namespace cubesum {
namespace rules {

// An elimination endorsed by an external theorem instead of a computation
// performed here.  Each verdict records which statement it leans on and the
// hypotheses that were verified before endorsing it; the pipeline can
// disable all trusted rules (audit mode) to cross-check them against the
// generic sieve chain.
struct TrustedVerdict {
    std::string rule_id;
    std::string citation;   // the mathematical statement relied upon
    std::string conditions; // hypotheses checked before firing
};

// Even-x cases (1 and 2), prime p >= 7: the Frey curve of a putative
// solution would need a weight-2 newform at a level supported on {2, 3},
// and those spaces are empty.  nullopt when the hypotheses fail.
std::optional<TrustedVerdict> modularity_even_x(Case c, uint32_t p);

// Case 3 with r = 2^k (k >= 2), prime p >= 5: same method; c = 2 r^2 keeps
// the level supported on {2, 3}.  nullopt when the hypotheses fail.
std::optional<TrustedVerdict> modularity_power_of_two(Case c, uint32_t r,
                                                      uint32_t p);

// Point on the p = 5 quintic curve of a case: Y^2 = X^5 - a^4 b for the
// even-x cases, Y^2 = 2 (X^5 - 3^8) for case 3.
struct CurvePoint {
    bool at_infinity;
    Int X, Y;
};

struct ChabautyFixture {
    TrustedVerdict rule;
    std::vector<CurvePoint> points; // the complete list of rational points
};

// Complete rational point lists for the p = 5 curves of cases 1-3, as
// established by Chabauty-type arguments on their genus-2 models: cases 1-2
// have only the point at infinity; case 3 adds (9, +-324).  Those affine
// points pull back to (y1, y2, r) = (1, 9, +-162), and the reconstruction
// rejects that triple because gcd(x, r) = 81.  nullopt for case 4 or p != 5.
std::optional<ChabautyFixture> chabauty_fixture(Case c, uint32_t p);

} // namespace rules
} // namespace cubesum
