#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cubesum/casesplit.hpp"
#include "cubesum/sieve.hpp"

namespace cubesum {
namespace localsolve {

// One step applied while making the coefficients pairwise coprime.
// 'd': every coefficient divided by factor (no substitution);
// '1': y1 replaced by factor*y1;  '2': y2 replaced by factor*y2.
struct TransformStep {
    Int factor;
    char which;
};

// A*rho^p - B*sigma^(2p) = C with A, B, C pairwise coprime and positive.
struct ReducedEquation {
    Int A, B, C;
    uint32_t p;
    std::vector<TransformStep> log;
};

struct ReduceOutcome {
    std::optional<ReducedEquation> red; // nullopt: no solutions exist
    Int blocking_prime; // divides A and B (but not C) when eliminated
};

// Repeatedly: divide out gcd(A,B,C); for g = Rad(gcd(A,C)) > 1 substitute
// y1 -> g*y1 and strip one g; for h = Rad(gcd(B,C)) > 1 substitute
// y2 -> h*y2 and strip one h.  C strictly decreases, so this terminates.
ReduceOutcome reduce_to_coprime(const Int& a, const Int& b, const Int& c,
                                uint32_t p);
ReduceOutcome reduce_to_coprime(const TernaryEquation& eq);

// For odd q | A the equation forces B*sigma^(2p) ≡ -C (mod q), so -BC must
// be a square mod q.  Returns the first obstructing prime.
std::optional<Int> qr_obstruction(const ReducedEquation& red);

enum class LocalVerdict { Soluble, Insoluble, Inconclusive };

struct LocalResult {
    LocalVerdict verdict;
    uint32_t depth; // when Insoluble: no roots exist even mod q^depth
};

// Decides whether the relaxed form A*X^p - B*Y^p = C (Y standing for
// sigma^2, its square structure dropped) has q-adic integer solutions.
// Insoluble therefore certifies the sigma-form has no q-adic points either,
// and depth is valid for it.  Exact valuation-split criteria cover odd
// q != p coprime to AB or dividing one of A, B, and q = p with
// 2 <= ord_p(C) <= p-2; a residue tree with strong-Hensel exits handles the
// rest.  depth_max = 0 selects the default ord_q(4 p^2 A B C) + 2.
// Inconclusive is possible only on tree paths.
LocalResult locally_soluble_at(const ReducedEquation& red, uint64_t q,
                               uint32_t depth_max = 0);

// First Insoluble among all primes q <= 19 together with every prime
// dividing A, B or C eliminates, with the witness prime recorded;
// Inconclusive never eliminates.  Solubility over the reals is automatic
// here: C > 0 and the X-term is an odd power.
SieveOutcome local_sieve(const ReducedEquation& red);
SieveOutcome local_sieve(const ReducedEquation& red,
                         const std::vector<uint64_t>& qs);

// Cross-equation cache for a fixed (A, B, p) shape where only C varies.
struct LocalCache {
    Int A, B;
    uint32_t p;
    std::vector<uint64_t> ab_small; // all q <= 19 plus support of A, B (lazy)
    bool ab_small_ready = false;
};

// local_sieve against the cached shape; c_fac is the prime factorization of
// C (ascending primes), used both for the q list and the valuations.
SieveOutcome
local_sieve_cached(LocalCache& cache, const Int& C,
                   const std::vector<std::pair<uint64_t, unsigned>>& c_fac);

} // namespace localsolve
} // namespace cubesum
