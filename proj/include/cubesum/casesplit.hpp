#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "cubesum/arith.hpp"

namespace cubesum {

// The equation 3x(x^2 + 2r^2) = y^p splits into four coprime cases by the
// residues of x mod 2 and mod 3.  Each case yields a ternary equation
//     a * y2^p - b * y1^(2p) = c
// where x = mult * y1^p and x^2 + 2r^2 = cof * y2^p.
enum class Case : int { C1 = 1, C2 = 2, C3 = 3, C4 = 4 };

struct InadmissibleR : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TernaryEquation {
    Case label;
    uint32_t r;
    uint32_t p;
    Int a, b, c;
};

namespace casesplit {

// x even iff case 1 or 2; x divisible by 3 iff case 1 or 3.
bool x_even(Case c);
bool x_div3(Case c);

// Which case an integer x coprime to 6-structure falls into.
Case case_for(const Int& x);

// Residue constraints on r for the case to be consistent with gcd(x,r)=1:
// cases 1-2 need r odd and 3 ∤ r, cases 3-4 need 3 ∤ r.
bool admissible(Case c, uint32_t r);

// Coefficient of y1^p in x  (2^(p-1) 3^(p-1), 2^(p-1), 3^(p-1), 1).
Int x_multiplier(Case c, uint32_t p);

// Coefficient of y2^p in x^2 + 2r^2  (2, 2*3^(p-1), 1, 3^(p-1)).
Int cofactor_coeff(Case c, uint32_t p);

// Throws InadmissibleR when admissible(c, r) fails.  gcd(a,b,c) = 1 holds for
// every admissible input (asserted).
TernaryEquation build_case_equation(Case c, uint32_t r, uint32_t p);

struct SolutionCandidate {
    Int x, y;
    uint32_t r;
    uint32_t p;
    Int y1, y2;
};

enum class RejectReason { IdentityMismatch, Trivial, GcdViolation };

struct Rejected {
    RejectReason reason;
};

using ReconstructResult = std::variant<SolutionCandidate, Rejected>;

// Maps a ternary solution (y1, y2) back to (x, y) and checks the cube
// identity, nontriviality (x*y != 0) and gcd(x, r) = 1, in that order.
ReconstructResult reconstruct_solution(Case c, uint32_t r, uint32_t p,
                                       const Int& y1, const Int& y2);

} // namespace casesplit
} // namespace cubesum
