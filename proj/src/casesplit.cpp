#include "cubesum/casesplit.hpp"

#include <cassert>

namespace cubesum {
namespace casesplit {

bool x_even(Case c) { return c == Case::C1 || c == Case::C2; }
bool x_div3(Case c) { return c == Case::C1 || c == Case::C3; }

Case case_for(const Int& x) {
    bool even = mpz_even_p(x.get_mpz_t());
    bool div3 = mpz_divisible_ui_p(x.get_mpz_t(), 3) != 0;
    if (even && div3) return Case::C1;
    if (even) return Case::C2;
    if (div3) return Case::C3;
    return Case::C4;
}

bool admissible(Case c, uint32_t r) {
    if (r == 0) return false;
    if (r % 3 == 0) return false;          // 3 | r contradicts every case
    if (x_even(c) && r % 2 == 0) return false; // x even forces r odd
    return true;
}

Int x_multiplier(Case c, uint32_t p) {
    Int m = 1;
    if (x_even(c)) m *= arith::pow_int(2, p - 1);
    if (x_div3(c)) m *= arith::pow_int(3, p - 1);
    return m;
}

Int cofactor_coeff(Case c, uint32_t p) {
    switch (c) {
        case Case::C1: return 2;
        case Case::C2: return 2 * arith::pow_int(3, p - 1);
        case Case::C3: return 1;
        case Case::C4: return arith::pow_int(3, p - 1);
    }
    throw std::logic_error("cofactor_coeff: bad case");
}

TernaryEquation build_case_equation(Case c, uint32_t r, uint32_t p) {
    if (!admissible(c, r))
        throw InadmissibleR("build_case_equation: r fails the case residue filter");
    Int rr = Int(r) * r;
    TernaryEquation eq;
    eq.label = c;
    eq.r = r;
    eq.p = p;
    switch (c) {
        case Case::C1:
            eq.a = 1;
            eq.b = arith::pow_int(2, 2 * p - 3) * arith::pow_int(3, 2 * p - 2);
            eq.c = rr;
            break;
        case Case::C2:
            eq.a = arith::pow_int(3, p - 1);
            eq.b = arith::pow_int(2, 2 * p - 3);
            eq.c = rr;
            break;
        case Case::C3:
            eq.a = 1;
            eq.b = arith::pow_int(3, 2 * p - 2);
            eq.c = 2 * rr;
            break;
        case Case::C4:
            eq.a = arith::pow_int(3, p - 1);
            eq.b = 1;
            eq.c = 2 * rr;
            break;
    }
    Int g;
    mpz_gcd(g.get_mpz_t(), eq.a.get_mpz_t(), eq.b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), eq.c.get_mpz_t());
    assert(g == 1);
    return eq;
}

ReconstructResult reconstruct_solution(Case c, uint32_t r, uint32_t p,
                                       const Int& y1, const Int& y2) {
    Int x = x_multiplier(c, p);
    {
        Int e;
        mpz_pow_ui(e.get_mpz_t(), y1.get_mpz_t(), p);
        x *= e;
    }
    Int y = 3 * y1 * y2;
    if (x_even(c)) y *= 2;

    Int lhs = (x - r) * (x - r) * (x - r) + x * x * x + (x + r) * (x + r) * (x + r);
    Int rhs;
    mpz_pow_ui(rhs.get_mpz_t(), y.get_mpz_t(), p);
    if (lhs != rhs) return Rejected{RejectReason::IdentityMismatch};

    if (x == 0 || y == 0) return Rejected{RejectReason::Trivial};

    Int g, rz = static_cast<unsigned long>(r);
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), rz.get_mpz_t());
    if (g != 1) return Rejected{RejectReason::GcdViolation};

    return SolutionCandidate{x, y, r, p, y1, y2};
}

} // namespace casesplit
} // namespace cubesum
