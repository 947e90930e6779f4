#include "cubesum/localsolve.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>

namespace cubesum {
namespace localsolve {

namespace {

Int gcd(const Int& x, const Int& y) {
    Int g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    return g;
}

uint64_t mod_u64(const Int& x, uint64_t m) {
    return mpz_fdiv_ui(x.get_mpz_t(), m);
}

// x a d-th power in F_q* (x must be a unit).
bool is_power_residue(uint64_t x, uint64_t q, uint64_t d) {
    uint64_t g = std::gcd(d, q - 1);
    return arith::powmod(x, (q - 1) / g, q) == 1;
}

struct Shape {
    const Int& A;
    const Int& B;
    const Int& C;
    uint32_t p;
};

// All verdicts below are for the relaxed form A*X^p - B*Y^p = C that the
// sieve actually tests (Y standing for sigma^2, its square structure
// dropped).  Insolubility of the relaxed form certifies insolubility of
// the original, since any (rho, sigma) solution yields (X, Y) = (rho,
// sigma^2).

// Exact criterion for odd q with q ∤ pAB, q != p and t = v_q(C) >= 1.
// A solution splits by the valuations of the two terms: X-dominant
// (v(A X^p) = t, the other term deeper or zero), Y-dominant, cancellation
// strictly below t, or both terms exactly at t.  Each live branch reduces
// to a p-th power-residue condition mod q and lifts by Hensel (the steered
// derivative is a unit).  All failing implies no roots even mod q^(t+1).
LocalResult analytic_offp(const Shape& s, uint64_t q, unsigned t) {
    uint64_t p = s.p;
    if (std::gcd<uint64_t>(p, q - 1) == 1)
        return {LocalVerdict::Soluble, 0}; // x -> x^p is onto the units
    uint64_t Am = mod_u64(s.A, q), Bm = mod_u64(s.B, q);
    Int qt = arith::pow_int(Int(static_cast<unsigned long>(q)), t);
    Int Cp;
    mpz_divexact(Cp.get_mpz_t(), s.C.get_mpz_t(), qt.get_mpz_t());
    uint64_t Cm = mod_u64(Cp, q);
    uint64_t Ainv = arith::invmod(Am, q);

    if (t % p == 0) {
        // X-dominant: p*alpha = t < v(B Y^p)
        if (is_power_residue(arith::mulmod(Cm, Ainv, q), q, p))
            return {LocalVerdict::Soluble, 0};
        // Y-dominant: p*beta = t < v(A X^p)
        uint64_t y = arith::mulmod(q - Cm, arith::invmod(Bm, q), q);
        if (is_power_residue(y, q, p))
            return {LocalVerdict::Soluble, 0};
    }
    // cancellation below t: unit solution of A*u^p ≡ B*w^p (mod q)
    if (is_power_residue(arith::mulmod(Bm, Ainv, q), q, p))
        return {LocalVerdict::Soluble, 0};
    // both terms exactly at t: unit point on A*u^p - B*w^p ≡ C' (mod q)
    if (t % p == 0) {
        for (uint64_t w = 1; w < q; ++w) {
            uint64_t rhs =
                arith::mulmod(arith::powmod(w, p, q), Bm, q) + Cm;
            if (rhs >= q) rhs -= q;
            rhs = arith::mulmod(rhs, Ainv, q);
            if (rhs != 0 && is_power_residue(rhs, q, p))
                return {LocalVerdict::Soluble, 0};
        }
    }
    return {LocalVerdict::Insoluble, t + 1};
}

// B/A a p-adic p-th power, detected mod p^2 (x in (Z_p*)^p iff
// x^(p-1) ≡ 1 mod p^2).
bool ba_pth_power_at_p(const Shape& s) {
    uint64_t p = s.p, p2 = p * p;
    uint64_t ba = arith::mulmod(mod_u64(s.B, p2),
                                arith::invmod(mod_u64(s.A, p2), p2), p2);
    return arith::powmod(ba, p - 1, p2) == 1;
}

// t = 0, odd q ∤ pAB: any point mod q has a unit coordinate (q ∤ C), whose
// derivative is a unit, so existence of a point mod q decides exactly.
LocalResult point_scan(const Shape& s, uint64_t q) {
    uint64_t p = s.p;
    if (std::gcd<uint64_t>(p, q - 1) == 1)
        return {LocalVerdict::Soluble, 0};
    uint64_t Am = mod_u64(s.A, q), Bm = mod_u64(s.B, q),
             Cm = mod_u64(s.C, q);
    uint64_t Ainv = arith::invmod(Am, q);
    for (uint64_t y = 0; y < q; ++y) {
        uint64_t rhs = arith::mulmod(arith::powmod(y, p, q), Bm, q) + Cm;
        if (rhs >= q) rhs -= q;
        rhs = arith::mulmod(rhs, Ainv, q);
        if (rhs == 0 || is_power_residue(rhs, q, p))
            return {LocalVerdict::Soluble, 0};
    }
    return {LocalVerdict::Insoluble, 1};
}

// Exact criterion for odd q != p dividing A exactly to order va >= 1
// (so q ∤ pBC' by coprimality).  Au, Cu are the unit parts of A and C
// mod q, t = v_q(C).  The four valuation patterns of analytic_offp,
// adjusted for the va shift on the X-term.
LocalResult analytic_divA(uint64_t Au, uint64_t Bm, uint64_t Cu, uint64_t q,
                          uint64_t p, unsigned va, unsigned t) {
    bool surj = std::gcd<uint64_t>(p, q - 1) == 1;
    // Y-dominant: p*beta = t, X-term deeper or zero
    if (t % p == 0) {
        uint64_t y = arith::mulmod(q - Cu, arith::invmod(Bm, q), q);
        if (surj || is_power_residue(y, q, p))
            return {LocalVerdict::Soluble, 0};
    }
    // X-dominant: va + p*alpha = t, Y-term deeper or zero
    if (t >= va && (t - va) % p == 0) {
        uint64_t x = arith::mulmod(Cu, arith::invmod(Au, q), q);
        if (surj || is_power_residue(x, q, p))
            return {LocalVerdict::Soluble, 0};
    }
    if (va % p == 0) {
        // cancellation strictly below t
        if (va < t) {
            uint64_t b = arith::mulmod(Bm, arith::invmod(Au, q), q);
            if (surj || is_power_residue(b, q, p))
                return {LocalVerdict::Soluble, 0};
        }
        // both terms exactly at t
        if (t % p == 0 && t >= va) {
            uint64_t Ainv = arith::invmod(Au, q);
            for (uint64_t w = 1; w < q; ++w) {
                uint64_t rhs =
                    arith::mulmod(arith::powmod(w, p, q), Bm, q) + Cu;
                if (rhs >= q) rhs -= q;
                rhs = arith::mulmod(rhs, Ainv, q);
                if (rhs != 0 && (surj || is_power_residue(rhs, q, p)))
                    return {LocalVerdict::Soluble, 0};
            }
        }
    }
    return {LocalVerdict::Insoluble, t + 1};
}

constexpr uint64_t VAL_INF = 1ull << 60;

// F(X, Y) = A*X^p - B*Y^p - C reduced into [0, M).
Int f_value_mod(const Shape& s, const Int& x, const Int& y, const Int& M) {
    Int xp, yp;
    mpz_powm_ui(xp.get_mpz_t(), x.get_mpz_t(), s.p, M.get_mpz_t());
    mpz_powm_ui(yp.get_mpz_t(), y.get_mpz_t(), s.p, M.get_mpz_t());
    Int v = (s.A % M) * xp - (s.B % M) * yp - (s.C % M);
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), M.get_mpz_t());
    return v;
}

// Residue tree: frontier at level e holds all roots of F mod q^e that have
// not yet met a strong-Hensel exit (F ≡ 0 mod q^e with e >= 2k+1 where k is
// the valuation of a partial derivative at the node).  Nodes past level 1
// have both derivatives ≡ 0 mod q, so a node's q^2 children are either all
// roots at the next level (F ≡ 0 mod q^(e+1)) or none are.
LocalResult residue_tree(const Shape& s, uint64_t q, uint32_t depth_max) {
    uint64_t p = s.p;
    Int qz = static_cast<unsigned long>(q);
    uint64_t vA = mod_u64(s.A, q) == 0 ? arith::valuation(s.A, qz) : 0;
    uint64_t vB = mod_u64(s.B, q) == 0 ? arith::valuation(s.B, qz) : 0;
    uint64_t vp = (q == p) ? 1 : 0;
    auto k_x = [&](uint64_t vx) {
        return vx >= VAL_INF ? VAL_INF : vp + vA + (p - 1) * vx;
    };
    auto k_y = [&](uint64_t vy) {
        return vy >= VAL_INF ? VAL_INF : vp + vB + (p - 1) * vy;
    };

    uint64_t Am = mod_u64(s.A, q), Bm = mod_u64(s.B, q),
             Cm = mod_u64(s.C, q);
    std::vector<uint64_t> xp(q);
    for (uint64_t i = 0; i < q; ++i)
        xp[i] = arith::powmod(i, p, q);
    std::vector<std::pair<Int, Int>> frontier;
    for (uint64_t i = 0; i < q; ++i) {
        for (uint64_t j = 0; j < q; ++j) {
            uint64_t f = (arith::mulmod(Am, xp[i], q) + 2 * q -
                          arith::mulmod(Bm, xp[j], q) - Cm) %
                         q;
            if (f != 0)
                continue;
            uint64_t k1 = k_x(i == 0 ? VAL_INF : 0);
            uint64_t k2 = k_y(j == 0 ? VAL_INF : 0);
            if (1 >= 2 * k1 + 1 || 1 >= 2 * k2 + 1)
                return {LocalVerdict::Soluble, 0};
            frontier.emplace_back(Int(static_cast<unsigned long>(i)),
                                  Int(static_cast<unsigned long>(j)));
        }
    }
    if (frontier.empty())
        return {LocalVerdict::Insoluble, 1};

    uint64_t budget = 500000;
    Int qe = qz; // q^e for the frontier's level e
    for (uint32_t e = 1; e < depth_max; ++e) {
        Int qe1 = qe * qz;
        std::vector<std::pair<Int, Int>> next;
        for (const auto& [x0, y0] : frontier) {
            if (budget-- == 0)
                return {LocalVerdict::Inconclusive, 0};
            Int f = f_value_mod(s, x0, y0, qe1);
            if (f != 0) // nonzero multiple of q^e: no children
                continue;
            for (uint64_t i = 0; i < q; ++i) {
                for (uint64_t j = 0; j < q; ++j) {
                    if (budget-- == 0)
                        return {LocalVerdict::Inconclusive, 0};
                    Int xc = x0 + qe * Int(static_cast<unsigned long>(i));
                    Int yc = y0 + qe * Int(static_cast<unsigned long>(j));
                    uint64_t vx =
                        xc == 0 ? VAL_INF : arith::valuation(xc, qz);
                    uint64_t vy =
                        yc == 0 ? VAL_INF : arith::valuation(yc, qz);
                    uint64_t k1 = k_x(vx), k2 = k_y(vy);
                    if (k1 < VAL_INF && e + 1 >= 2 * k1 + 1)
                        return {LocalVerdict::Soluble, 0};
                    if (k2 < VAL_INF && e + 1 >= 2 * k2 + 1)
                        return {LocalVerdict::Soluble, 0};
                    next.emplace_back(std::move(xc), std::move(yc));
                }
            }
        }
        if (next.empty())
            return {LocalVerdict::Insoluble, e + 1};
        frontier = std::move(next);
        qe = qe1;
    }
    return {LocalVerdict::Inconclusive, 0};
}

// Support primes of x: small primes by direct division, anything left by
// full factorization (cheap for the sieve's coefficients, whose cofactor
// after stripping the small primes is 1).
void support_primes(const Int& x, std::set<uint64_t>& out) {
    Int rest = x;
    for (uint64_t q : {2, 3, 5, 7, 11, 13, 17, 19}) {
        if (mpz_fdiv_ui(rest.get_mpz_t(), q) == 0) {
            out.insert(q);
            Int qz = static_cast<unsigned long>(q);
            while (mpz_divisible_p(rest.get_mpz_t(), qz.get_mpz_t()))
                mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(),
                             qz.get_mpz_t());
        }
    }
    if (rest > 1) {
        for (const auto& [q, e] : arith::factorize(rest)) {
            (void)e;
            out.insert(q.get_ui());
        }
    }
}

uint32_t default_depth(const Shape& s, uint64_t q) {
    Int qz = static_cast<unsigned long>(q);
    uint64_t d = 2;
    d += (q == 2) ? 2 : 0;                    // ord_q(4)
    d += (q == s.p) ? 2 : 0;                  // ord_q(p^2)
    if (mod_u64(s.A, q) == 0) d += arith::valuation(s.A, qz);
    if (mod_u64(s.B, q) == 0) d += arith::valuation(s.B, qz);
    if (mod_u64(s.C, q) == 0) d += arith::valuation(s.C, qz);
    return static_cast<uint32_t>(std::min<uint64_t>(d, 100000));
}

LocalResult solubility(const Shape& s, uint64_t q, uint32_t depth_max) {
    assert(arith::is_prime(q));
    unsigned t = mod_u64(s.C, q) == 0
                     ? arith::valuation(s.C, Int(static_cast<unsigned long>(q)))
                     : 0;
    if (depth_max == 0)
        depth_max = default_depth(s, q);
    bool divA = mod_u64(s.A, q) == 0, divB = mod_u64(s.B, q) == 0;
    if (q != 2 && q != s.p) {
        Int qz = static_cast<unsigned long>(q);
        if (!divA && !divB) {
            if (t == 0)
                return point_scan(s, q);
            return analytic_offp(s, q, t);
        }
        if (divA && !divB) {
            unsigned va = static_cast<unsigned>(arith::valuation(s.A, qz));
            Int Aq = arith::pow_int(qz, va), Au;
            mpz_divexact(Au.get_mpz_t(), s.A.get_mpz_t(), Aq.get_mpz_t());
            Int qt = arith::pow_int(qz, t), Cu;
            mpz_divexact(Cu.get_mpz_t(), s.C.get_mpz_t(), qt.get_mpz_t());
            return analytic_divA(mod_u64(Au, q), mod_u64(s.B, q),
                                 mod_u64(Cu, q), q, s.p, va, t);
        }
        if (divB && !divA) {
            // mirror through B*Y^p - A*X^p = -C
            unsigned vb = static_cast<unsigned>(arith::valuation(s.B, qz));
            Int Bq = arith::pow_int(qz, vb), Bu;
            mpz_divexact(Bu.get_mpz_t(), s.B.get_mpz_t(), Bq.get_mpz_t());
            Int qt = arith::pow_int(qz, t), Cu;
            mpz_divexact(Cu.get_mpz_t(), s.C.get_mpz_t(), qt.get_mpz_t());
            uint64_t mCu = (q - mod_u64(Cu, q)) % q;
            return analytic_divA(mod_u64(Bu, q), mod_u64(s.A, q), mCu, q,
                                 s.p, vb, t);
        }
    }
    if (q == s.p && !divA && !divB) {
        bool absorbs = ba_pth_power_at_p(s);
        // 2 <= t <= p-2: t is never 0 mod p, so the dominant and
        // balanced-at-t patterns are impossible, and a unit p-th power
        // that is 1 mod p is automatically 1 mod p^2, which closes
        // depth-one cancellation.  Everything rides on cancellation
        // through a p-th root of B/A: soluble iff one exists.
        if (t >= 2 && t + 2 <= s.p)
            return absorbs ? LocalResult{LocalVerdict::Soluble, 0}
                           : LocalResult{LocalVerdict::Insoluble,
                                         static_cast<uint32_t>(t + 2)};
        // Otherwise, when B/A is a p-adic p-th power the coefficient
        // absorbs into Y and this routine extracts no obstruction at
        // q = p; the equation is left to the later stages.
        if (absorbs)
            return {LocalVerdict::Inconclusive, 0};
    }
    return residue_tree(s, q, depth_max);
}

} // namespace

ReduceOutcome reduce_to_coprime(const Int& a0, const Int& b0, const Int& c0,
                                uint32_t p) {
    assert(a0 >= 1 && b0 >= 1 && c0 >= 1);
    Int A = a0, B = b0, C = c0;
    std::vector<TransformStep> log;
    for (;;) {
        Int d = gcd(gcd(A, B), C);
        if (d > 1) {
            mpz_divexact(A.get_mpz_t(), A.get_mpz_t(), d.get_mpz_t());
            mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), d.get_mpz_t());
            mpz_divexact(C.get_mpz_t(), C.get_mpz_t(), d.get_mpz_t());
            log.push_back({d, 'd'});
            continue;
        }
        Int gac = gcd(A, C);
        if (gac > 1) {
            Int g = arith::radical(gac); // g | y1 is forced
            mpz_divexact(A.get_mpz_t(), A.get_mpz_t(), g.get_mpz_t());
            B *= arith::pow_int(g, 2 * p - 1);
            mpz_divexact(C.get_mpz_t(), C.get_mpz_t(), g.get_mpz_t());
            log.push_back({g, '1'});
            continue;
        }
        Int gbc = gcd(B, C);
        if (gbc > 1) {
            Int h = arith::radical(gbc); // h | y2 is forced
            A *= arith::pow_int(h, p - 1);
            mpz_divexact(B.get_mpz_t(), B.get_mpz_t(), h.get_mpz_t());
            mpz_divexact(C.get_mpz_t(), C.get_mpz_t(), h.get_mpz_t());
            log.push_back({h, '2'});
            continue;
        }
        break;
    }
    Int gab = gcd(A, B);
    if (gab > 1) {
        // a prime divides A and B but not C: impossible modulo that prime
        Int q = arith::factorize(gab).front().first;
        return {std::nullopt, q};
    }
    assert(gcd(A, C) == 1 && gcd(B, C) == 1);
    return {ReducedEquation{std::move(A), std::move(B), std::move(C), p,
                            std::move(log)},
            0};
}

ReduceOutcome reduce_to_coprime(const TernaryEquation& eq) {
    return reduce_to_coprime(eq.a, eq.b, eq.c, eq.p);
}

std::optional<Int> qr_obstruction(const ReducedEquation& red) {
    if (red.A == 1)
        return std::nullopt;
    Int mBC = -(red.B * red.C);
    for (const auto& [q, e] : arith::factorize(red.A)) {
        (void)e;
        if (q == 2)
            continue;
        if (mpz_legendre(mBC.get_mpz_t(), q.get_mpz_t()) == -1)
            return q;
    }
    return std::nullopt;
}

LocalResult locally_soluble_at(const ReducedEquation& red, uint64_t q,
                               uint32_t depth_max) {
    return solubility({red.A, red.B, red.C, red.p}, q, depth_max);
}

SieveOutcome local_sieve(const ReducedEquation& red,
                         const std::vector<uint64_t>& qs) {
    for (uint64_t q : qs) {
        LocalResult res = locally_soluble_at(red, q);
        if (res.verdict == LocalVerdict::Insoluble)
            return SieveOutcome::killed(q);
    }
    return SieveOutcome::survives();
}

SieveOutcome local_sieve(const ReducedEquation& red) {
    // every prime up to 19 plus the full support of A, B and C
    std::set<uint64_t> qs = {2, 3, 5, 7, 11, 13, 17, 19};
    support_primes(red.A, qs);
    support_primes(red.B, qs);
    support_primes(red.C, qs);
    return local_sieve(red, std::vector<uint64_t>(qs.begin(), qs.end()));
}

SieveOutcome
local_sieve_cached(LocalCache& cache, const Int& C,
                   const std::vector<std::pair<uint64_t, unsigned>>& c_fac) {
    Shape s{cache.A, cache.B, C, cache.p};
    // same prime set as local_sieve(red): all q <= 19 and the support of ABC
    if (!cache.ab_small_ready) {
        std::set<uint64_t> base = {2, 3, 5, 7, 11, 13, 17, 19};
        support_primes(cache.A, base);
        support_primes(cache.B, base);
        cache.ab_small.assign(base.begin(), base.end());
        cache.ab_small_ready = true;
    }
    std::set<uint64_t> qs(cache.ab_small.begin(), cache.ab_small.end());
    for (const auto& [q, e] : c_fac) {
        (void)e;
        qs.insert(q);
    }
    for (uint64_t q : qs) {
        if (solubility(s, q, 0).verdict == LocalVerdict::Insoluble)
            return SieveOutcome::killed(q);
    }
    return SieveOutcome::survives();
}

} // namespace localsolve
} // namespace cubesum
