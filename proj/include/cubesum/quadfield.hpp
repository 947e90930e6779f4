#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cubesum/arith.hpp"

namespace cubesum {
namespace quadfield {

// Q(sqrt(-m)) for squarefree m >= 1, with its ring of integers Z[omega].
struct ImagQuadField {
    uint32_t m;      // radicand
    Int D;           // field discriminant (negative)
    uint32_t w;      // number of roots of unity: 6 (m=3), 4 (m=1), else 2
    uint32_t omega_trace; // Tr(omega): 1 when m ≡ 3 (mod 4), else 0
    Int omega_norm;       // N(omega): (m+1)/4 when m ≡ 3 (mod 4), else m
};

// Throws std::invalid_argument unless m >= 1 and squarefree.
ImagQuadField make_field(uint32_t m);

// (s + t*sqrt(-m)) / d.  d == 2 only when m ≡ 3 (mod 4) and s ≡ t (mod 2).
struct QuadElement {
    Int s;
    Int t;
    uint32_t d = 1;

    bool operator==(const QuadElement& o) const {
        return s == o.s && t == o.t && d == o.d;
    }
};

QuadElement qe_one();
QuadElement qe_int(Int v);
// Canonical form: d minimal, and (s > 0) or (s == 0 and t >= 0).
// Sign canonicalization is applied only by callers that want it.
QuadElement qe_reduce_denominator(QuadElement e);

QuadElement mul(const ImagQuadField& K, const QuadElement& x,
                const QuadElement& y);
QuadElement conj(const QuadElement& x);
QuadElement pow(const ImagQuadField& K, const QuadElement& x, uint32_t e);
// (s^2 + m t^2) / d^2, always a nonnegative rational integer for integral x.
Int norm(const ImagQuadField& K, const QuadElement& x);
Int trace(const QuadElement& x);

enum class SplitType { Split, Inert, Ramified };

// A prime of Z[omega] above q.  For split and ramified primes, root is the
// image of sqrt(-m) in the residue field F_q; the conjugate prime above a
// split q carries root q - root.  Split q = 2 is rejected (never needed).
struct PrimeIdeal {
    uint64_t q;
    SplitType type;
    uint64_t root;
};

SplitType split_type(const ImagQuadField& K, uint64_t q);
std::vector<PrimeIdeal> primes_above(const ImagQuadField& K, uint64_t q);
PrimeIdeal conjugate_ideal(const PrimeIdeal& P);

// ord_P(x) for x != 0 (can be negative only via the denominator d).
int64_t ord_at(const ImagQuadField& K, const QuadElement& x,
               const PrimeIdeal& P);
// Image of x in Z[omega]/P = F_q (split or ramified P; x must be P-integral).
uint64_t residue(const ImagQuadField& K, const QuadElement& x,
                 const PrimeIdeal& P);

// Positive definite integral binary quadratic form F1 X^2 + F2 XY + F3 Y^2.
struct BQForm {
    Int F1, F2, F3;

    bool operator==(const BQForm& o) const {
        return F1 == o.F1 && F2 == o.F2 && F3 == o.F3;
    }
    bool operator<(const BQForm& o) const {
        if (F1 != o.F1) return F1 < o.F1;
        if (F2 != o.F2) return F2 < o.F2;
        return F3 < o.F3;
    }
};

Int discriminant(const BQForm& f);
bool is_reduced(const BQForm& f);
BQForm reduce(BQForm f);
BQForm principal_form(const Int& D);
// All primitive reduced forms of discriminant D < 0 — the class group.
std::vector<BQForm> class_group(const Int& D);
// Gaussian composition, computed through ideal multiplication.
BQForm compose(const Int& D, const BQForm& f, const BQForm& g);

// Integral ideal of Z[omega] as the Z-module [a, b + c*omega] (HNF).
struct OIdeal {
    Int a, b, c;
};

Int ideal_norm(const OIdeal& I);
OIdeal ideal_one();
OIdeal ideal_of_prime(const ImagQuadField& K, const PrimeIdeal& P);
OIdeal mul(const ImagQuadField& K, const OIdeal& I, const OIdeal& J);
OIdeal pow(const ImagQuadField& K, const OIdeal& I, uint32_t e);
BQForm form_of_ideal(const ImagQuadField& K, const OIdeal& I);

// Generator when I is principal (shortest lattice vector has the ideal's
// norm), sign-normalized; nullopt otherwise.
std::optional<QuadElement> principal_generator(const ImagQuadField& K,
                                               const OIdeal& I);

uint32_t class_number(const ImagQuadField& K);
// Order of the ideal class of P in the class group.
uint32_t class_order(const ImagQuadField& K, const PrimeIdeal& P);

// F_p-basis of the p-Selmer group K(S, p): one generator alpha_P per P in S,
// generating P^(order of [P]).  Requires p coprime to both the class number
// and the unit count w; returns nullopt when that fails (method inapplicable).
std::optional<std::vector<QuadElement>>
selmer_set(const ImagQuadField& K, const std::vector<PrimeIdeal>& S,
           uint32_t p);

} // namespace quadfield
} // namespace cubesum
