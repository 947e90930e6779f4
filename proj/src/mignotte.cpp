#include "cubesum/mignotte.hpp"

#include <mpfr.h>

namespace cubesum {
namespace mignotte {

namespace {

constexpr mpfr_prec_t PREC = 256;

struct Real {
    mpfr_t v;
    Real() { mpfr_init2(v, PREC); }
    explicit Real(const Int& z, mpfr_rnd_t rnd) {
        mpfr_init2(v, PREC);
        mpfr_set_z(v, z.get_mpz_t(), rnd);
    }
    ~Real() { mpfr_clear(v); }
    Real(const Real&) = delete;
    Real& operator=(const Real&) = delete;
};

// ln(x) for integer x > 0, rounded in the requested direction.
void log_of(mpfr_t out, const Int& x, mpfr_rnd_t rnd) {
    Real t(x, rnd);
    mpfr_log(out, t.v, rnd);
}

} // namespace

double bound_raw(const Int& a, const Int& b, const Int& c) {
    if (a <= 0 || b <= 0 || c <= 0)
        throw InvalidInput("bound_raw: coefficients must be positive");
    if (a == b)
        throw InvalidInput("bound_raw: a = b degenerates the bound");

    Int A = a > b ? a : b;
    if (A < 3) A = 3;

    // branch 1: 3 ln(1.5 c / b), rounded up throughout
    Real b1;
    {
        Real t;
        mpfr_set_z(t.v, c.get_mpz_t(), MPFR_RNDU);
        mpfr_mul_ui(t.v, t.v, 3, MPFR_RNDU);
        mpfr_div_ui(t.v, t.v, 2, MPFR_RNDU);
        Real bz(b, MPFR_RNDD);
        mpfr_div(t.v, t.v, bz.v, MPFR_RNDU);
        mpfr_log(b1.v, t.v, MPFR_RNDU);
        mpfr_mul_ui(b1.v, b1.v, 3, MPFR_RNDU);
    }

    // branch 2: 7400 ln A / ln(1 + ln A / |ln(a/b)|)
    // numerator up, denominator down.
    Real b2;
    {
        Real lnA_up, lnA_dn;
        log_of(lnA_up.v, A, MPFR_RNDU);
        log_of(lnA_dn.v, A, MPFR_RNDD);

        // |ln(a/b)| = |ln a - ln b|; round it up to push the quotient down
        Real lab_up;
        {
            Real la(a, MPFR_RNDU), lb(b, MPFR_RNDD);
            mpfr_log(la.v, la.v, MPFR_RNDU);
            mpfr_log(lb.v, lb.v, MPFR_RNDD);
            mpfr_sub(lab_up.v, la.v, lb.v, MPFR_RNDU);
            mpfr_abs(lab_up.v, lab_up.v, MPFR_RNDU);
        }

        Real den;
        mpfr_div(den.v, lnA_dn.v, lab_up.v, MPFR_RNDD);
        mpfr_add_ui(den.v, den.v, 1, MPFR_RNDD);
        mpfr_log(den.v, den.v, MPFR_RNDD);

        mpfr_mul_ui(b2.v, lnA_up.v, 7400, MPFR_RNDU);
        mpfr_div(b2.v, b2.v, den.v, MPFR_RNDU);
    }

    if (mpfr_cmp(b1.v, b2.v) < 0)
        return mpfr_get_d(b2.v, MPFR_RNDU);
    return mpfr_get_d(b1.v, MPFR_RNDU);
}

Int bound(const Int& a, const Int& b, const Int& c) {
    double raw = bound_raw(a, b, c);
    Int out;
    mpfr_t t;
    mpfr_init2(t, PREC);
    mpfr_set_d(t, raw, MPFR_RNDU);
    mpfr_ceil(t, t);
    mpfr_get_z(out.get_mpz_t(), t, MPFR_RNDU);
    mpfr_clear(t);
    return out;
}

std::optional<BoundShape> bound_shape(Case c, const Int& r) {
    switch (c) {
        case Case::C3: return BoundShape{9, 1, 18 * r * r};
        case Case::C4: return BoundShape{3, 1, 6 * r * r};
        default: return std::nullopt;
    }
}

Int max_r_covered(Case c) {
    Int m;
    switch (c) {
        case Case::C3:
            mpz_ui_pow_ui(m.get_mpz_t(), 10, 1695);
            return 155 * m; // 1.55e1697
        case Case::C4:
            mpz_ui_pow_ui(m.get_mpz_t(), 10, 846);
            return 299 * m; // 2.99e848
        default:
            return 0;
    }
}

std::optional<uint32_t> exponent_cap(Case c, const Int& r_max) {
    if (c == Case::C1 || c == Case::C2) return std::nullopt;
    if (r_max < 1 || r_max > max_r_covered(c))
        throw std::domain_error("exponent_cap: r_max outside the covered range");
    return c == Case::C3 ? 24000u : 12000u;
}

} // namespace mignotte
} // namespace cubesum
