#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubesum/localsolve.hpp"
#include "cubesum/quadfield.hpp"

namespace cubesum {
namespace descent {

// Multiply A*y2^p - B*y1^(2p) = C through by Bprime (the product of primes
// appearing to an odd power in B); then B*Bprime = v^2, A*Bprime = u and
// C*Bprime = m*n^2 with m squarefree, giving
//     (v*y1^p + n*sqrt(-m)) * (v*y1^p - n*sqrt(-m)) = u * y2^p
// over Q(sqrt(-m)).  S holds every prime of Z[omega] dividing u or
// 2*n*sqrt(-m); split primes enter as conjugate pairs (smaller root first).
struct DescentData {
    Int A, B, C;
    uint32_t p;
    Int Bprime, v, u, n;
    uint32_t m;
    quadfield::ImagQuadField field;
    std::vector<quadfield::PrimeIdeal> S;
};

// Throws arith::OutOfCertifiedRange when the squarefree part of C*Bprime is
// too large to build the field.
DescentData descent_data(const Int& A, const Int& B, const Int& C,
                         uint32_t p);

// One ε with v*y1^p + n*sqrt(-m) = ε * η^p: exponents over the Selmer basis
// (aligned with S), the element itself, and its conjugate.
struct EpsilonCandidate {
    std::vector<uint32_t> exps;
    quadfield::QuadElement value;
    quadfield::QuadElement conjugate;
};

// Every ε in K(S, p) whose norm agrees with u up to rational p-th powers.
// nullopt when the Selmer basis is unavailable or the candidate count would
// exceed the guard.
std::optional<std::vector<EpsilonCandidate>>
epsilon_candidates(const DescentData& d, uint64_t guard = 1'000'000);

// True when some prime of Z[omega] has {ord(v), ord(n*sqrt(-m)), ord(ε)},
// {ord(2v), ord(ε), ord(conj ε)} or {ord(2n*sqrt(-m)), ord(ε), ord(conj ε)}
// pairwise distinct mod p — then no solution can use this ε.
bool eliminate_by_valuation(const DescentData& d, const EpsilonCandidate& e);

enum class ChiVerdict { Eliminated, Undecided, SkipWitness };

// Witness prime q = 2kp + 1: collect the p-th powers ζ of F_q compatible
// with ((v ζ + n sqrt(-m)) / ε) being a p-th power at both primes over q;
// an empty set eliminates ε.  SkipWitness when q is not usable (composite,
// not split, or meeting 2unm).
ChiVerdict eliminate_by_chi(const DescentData& d, const EpsilonCandidate& e,
                            uint64_t k);

struct DescentOutcome {
    bool eliminated;     // every ε ruled out (or none existed)
    bool exhausted;      // false when a guard stopped the enumeration
    uint64_t candidates; // candidates left after the norm filter and the
                         // per-prime ord-feasibility prune
    std::string note;
};

// Full second descent: Selmer basis, norm filter, ord-feasibility prune at
// each prime of S (a sharper per-prime form of the valuation criterion), then
// chi witnesses k = 1..chi_k_max per surviving candidate.  Conservative on
// every failure path (inapplicable Selmer or guard -> not eliminated).
DescentOutcome descent_sieve(const DescentData& d, uint32_t chi_k_max = 100,
                             uint64_t guard = 1'000'000);

// Same, folded into the shared sieve verdict: eliminated only when every
// candidate is ruled out with the enumeration exhausted.  Any failure to
// set up the field (class number divisible by p, oversized coefficients)
// counts as survival.
SieveOutcome descent_sieve(const localsolve::ReducedEquation& red,
                           uint32_t k_max = 100, uint64_t guard = 1'000'000);

} // namespace descent
} // namespace cubesum
