#include "cubesum/sieve.hpp"

#include <algorithm>
#include <cassert>

namespace cubesum {
namespace sieve {

uint64_t generator(uint64_t q) {
    assert(q >= 3 && arith::is_prime(q));
    auto fac = arith::factorize(q - 1);
    for (uint64_t g = 2;; ++g) {
        bool ok = true;
        for (const auto& [prime, exp] : fac) {
            (void)exp;
            if (arith::powmod(g, (q - 1) / prime, q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok)
            return g;
    }
}

std::vector<uint64_t> unity_roots_with_zero(uint64_t q, uint64_t d) {
    assert(d >= 1 && (q - 1) % d == 0);
    uint64_t step = arith::powmod(generator(q), (q - 1) / d, q);
    std::vector<uint64_t> out;
    out.reserve(d + 1);
    out.push_back(0);
    uint64_t cur = 1;
    for (uint64_t i = 0; i < d; ++i) {
        out.push_back(cur);
        cur = arith::mulmod(cur, step, q);
    }
    assert(cur == 1);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<WitnessPrime> witness_primes(uint32_t p, const Int& a,
                                         uint32_t k_max) {
    std::vector<WitnessPrime> out;
    for (uint64_t k = 1; k <= k_max; ++k) {
        uint64_t q = 2 * k * p + 1;
        if (!arith::is_prime(q))
            continue;
        if (mpz_fdiv_ui(a.get_mpz_t(), q) == 0)
            continue;
        out.push_back({q, k});
    }
    return out;
}

std::vector<uint64_t> mu_set(uint32_t p, const WitnessPrime& w) {
    assert(w.q == 2 * w.k * p + 1);
    return unity_roots_with_zero(w.q, w.k);
}

WitnessContext::WitnessContext(uint32_t p, const WitnessPrime& w_,
                               const Int& a, const Int& b)
    : w(w_) {
    assert(w.q == 2 * w.k * p + 1);
    mu = unity_roots_with_zero(w.q, w.k);
    pth_powers = unity_roots_with_zero(w.q, 2 * w.k);
    a_mod = mpz_fdiv_ui(a.get_mpz_t(), w.q);
    b_mod = mpz_fdiv_ui(b.get_mpz_t(), w.q);
    if (a_mod == 0)
        throw WitnessInvalid("witness prime divides leading coefficient");
    a_inv = arith::invmod(a_mod, w.q);
}

bool WitnessContext::is_pth_power(uint64_t v) const {
    return std::binary_search(pth_powers.begin(), pth_powers.end(), v);
}

bool WitnessContext::b_set_nonempty(uint64_t c_mod) const {
    for (uint64_t zeta : mu) {
        uint64_t t = arith::mulmod(b_mod, zeta, w.q) + c_mod;
        if (t >= w.q)
            t -= w.q;
        if (is_pth_power(arith::mulmod(t, a_inv, w.q)))
            return true;
    }
    return false;
}

std::vector<WitnessContext> witness_contexts(uint32_t p, const Int& a,
                                             const Int& b, uint32_t k_max) {
    std::vector<WitnessContext> out;
    for (const auto& w : witness_primes(p, a, k_max))
        out.emplace_back(p, w, a, b);
    return out;
}

std::vector<uint64_t> b_set(const TernaryEquation& eq, const WitnessPrime& w) {
    WitnessContext ctx(eq.p, w, eq.a, eq.b); // throws WitnessInvalid if q | a
    uint64_t c_mod = mpz_fdiv_ui(eq.c.get_mpz_t(), w.q);
    std::vector<uint64_t> out;
    for (uint64_t zeta : ctx.mu) {
        uint64_t t = arith::mulmod(ctx.b_mod, zeta, w.q) + c_mod;
        if (t >= w.q)
            t -= w.q;
        if (ctx.is_pth_power(arith::mulmod(t, ctx.a_inv, w.q)))
            out.push_back(zeta);
    }
    return out;
}

SieveOutcome sieve_pp2(const TernaryEquation& eq, uint32_t k_max) {
    for (const auto& w : witness_primes(eq.p, eq.a, k_max)) {
        if (b_set(eq, w).empty())
            return SieveOutcome::killed(w.q);
    }
    return SieveOutcome::survives();
}

SieveOutcome sieve_with_contexts(const std::vector<WitnessContext>& ctxs,
                                 const Int& c) {
    for (const auto& ctx : ctxs) {
        uint64_t c_mod = mpz_fdiv_ui(c.get_mpz_t(), ctx.w.q);
        if (!ctx.b_set_nonempty(c_mod))
            return SieveOutcome::killed(ctx.w.q);
    }
    return SieveOutcome::survives();
}

} // namespace sieve
} // namespace cubesum
