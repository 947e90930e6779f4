#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cubesum/casesplit.hpp"

namespace cubesum {

struct WitnessInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A prime q = 2kp + 1.  In F_q the 2p-th powers form the small set
// mu = {0} ∪ {k-th roots of unity}, which is what makes q useful as a witness.
struct WitnessPrime {
    uint64_t q;
    uint64_t k;
};

struct SieveOutcome {
    bool eliminated;
    uint64_t witness_q; // killing prime when eliminated, else 0

    static SieveOutcome survives() { return {false, 0}; }
    static SieveOutcome killed(uint64_t q) { return {true, q}; }
};

namespace sieve {

// Primitive root mod q.
uint64_t generator(uint64_t q);

// {0} ∪ {d-th roots of unity in F_q}, sorted ascending.  Requires d | q-1.
std::vector<uint64_t> unity_roots_with_zero(uint64_t q, uint64_t d);

// All primes q = 2kp+1 with 1 <= k <= k_max and q ∤ a, ascending.
std::vector<WitnessPrime> witness_primes(uint32_t p, const Int& a,
                                         uint32_t k_max);

// mu(p,q) = {eta^(2p) : eta in F_q} = {0} ∪ {k-th roots of unity}; size k+1.
std::vector<uint64_t> mu_set(uint32_t p, const WitnessPrime& w);

// Tables for one witness prime against fixed (a, b), reused across the inner
// loop over r where only c varies.
struct WitnessContext {
    WitnessPrime w;
    std::vector<uint64_t> mu;         // {0} ∪ k-th roots of unity, sorted
    std::vector<uint64_t> pth_powers; // {0} ∪ 2k-th roots of unity, sorted;
                                      // equals the set of p-th powers in F_q
    uint64_t a_mod, b_mod, a_inv;

    WitnessContext(uint32_t p, const WitnessPrime& w, const Int& a,
                   const Int& b);

    bool is_pth_power(uint64_t v) const;

    // True iff some zeta in mu has ((b*zeta + c) / a)^(2k) in {0, 1}, i.e. the
    // equation a*y2^p - b*y1^(2p) = c is consistent mod q.
    bool b_set_nonempty(uint64_t c_mod) const;
};

// Contexts for all witnesses of eq's (p, a, b) up to k_max.
std::vector<WitnessContext> witness_contexts(uint32_t p, const Int& a,
                                             const Int& b, uint32_t k_max);

// B(p,q) = {zeta in mu : ((b*zeta+c)/a)^(2k) mod q ∈ {0,1}}, sorted.
// Throws WitnessInvalid when q | a.
std::vector<uint64_t> b_set(const TernaryEquation& eq, const WitnessPrime& w);

// Scan witnesses ascending; the first empty B(p,q) proves non-existence
// (an integer solution would reduce mod q into B).  No witness => survives.
SieveOutcome sieve_pp2(const TernaryEquation& eq, uint32_t k_max);

// Same scan against prebuilt contexts, c supplied directly.
SieveOutcome sieve_with_contexts(const std::vector<WitnessContext>& ctxs,
                                 const Int& c);

} // namespace sieve
} // namespace cubesum
