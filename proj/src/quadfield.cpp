#include "cubesum/quadfield.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace cubesum {
namespace quadfield {

namespace {

// omega-multiplication context: omega^2 = T*omega - Nw.  Valid for the
// quadratic order of any discriminant D < 0 with D ≡ 0, 1 (mod 4).
struct Ctx {
    uint32_t T;
    Int Nw;
    Int D;
};

Ctx ctx_of_disc(const Int& D) {
    if (D >= 0)
        throw std::invalid_argument("discriminant must be negative");
    uint64_t rem = mpz_fdiv_ui(D.get_mpz_t(), 4);
    if (rem == 1)
        return {1, (1 - D) / 4, D};
    if (rem == 0)
        return {0, -D / 4, D};
    throw std::invalid_argument("discriminant must be 0 or 1 mod 4");
}

Ctx ctx_of_field(const ImagQuadField& K) {
    return {K.omega_trace, K.omega_norm, K.D};
}

// coordinates over (1, omega)
using Vec = std::pair<Int, Int>;

Vec vec_mul(const Ctx& cx, const Vec& x, const Vec& y) {
    return {x.first * y.first - cx.Nw * x.second * y.second,
            x.first * y.second + x.second * y.first +
                Int(cx.T) * x.second * y.second};
}

Int vec_qf(const Ctx& cx, const Vec& v) { // N(x + y*omega)
    return v.first * v.first + Int(cx.T) * v.first * v.second +
           cx.Nw * v.second * v.second;
}

Int vec_bilinear(const Ctx& cx, const Vec& v, const Vec& w) { // Tr(v*conj(w))
    return 2 * v.first * w.first +
           Int(cx.T) * (v.first * w.second + v.second * w.first) +
           2 * cx.Nw * v.second * w.second;
}

Int int_gcd(const Int& x, const Int& y) {
    Int g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    return g;
}

OIdeal hnf_from_generators(const Ctx& cx, std::vector<Vec> gens) {
    (void)cx;
    Int B = 0, C = 0;
    for (const auto& [x, y] : gens) {
        if (y == 0)
            continue;
        if (C == 0) {
            B = x;
            C = y;
            if (C < 0) {
                B = -B;
                C = -C;
            }
            continue;
        }
        Int g, u, v;
        mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(),
                   C.get_mpz_t(), y.get_mpz_t());
        B = u * B + v * x;
        C = g;
    }
    if (C == 0)
        throw std::invalid_argument("module of rank < 2");
    Int A = 0;
    for (const auto& [x, y] : gens) {
        Int r = x;
        if (y != 0) {
            Int k;
            mpz_divexact(k.get_mpz_t(), y.get_mpz_t(), C.get_mpz_t());
            r = x - k * B;
        }
        if (r != 0)
            A = (A == 0) ? abs(r) : int_gcd(A, r);
    }
    if (A == 0)
        throw std::invalid_argument("module of rank < 2");
    mpz_fdiv_r(B.get_mpz_t(), B.get_mpz_t(), A.get_mpz_t());
    assert(A % C == 0 && B % C == 0); // O-module, not a bare lattice
    return {A, B, C};
}

OIdeal ideal_mul(const Ctx& cx, const OIdeal& I, const OIdeal& J) {
    Vec i1{I.a, 0}, i2{I.b, I.c}, j1{J.a, 0}, j2{J.b, J.c};
    return hnf_from_generators(
        cx, {vec_mul(cx, i1, j1), vec_mul(cx, i1, j2), vec_mul(cx, i2, j1),
             vec_mul(cx, i2, j2)});
}

BQForm form_of(const Ctx& cx, const OIdeal& I) {
    Int A, b0;
    mpz_divexact(A.get_mpz_t(), I.a.get_mpz_t(), I.c.get_mpz_t());
    mpz_divexact(b0.get_mpz_t(), I.b.get_mpz_t(), I.c.get_mpz_t());
    Int B = cx.T == 0 ? Int(-2 * b0) : Int(-(2 * b0 + 1));
    Int num = B * B - cx.D;
    Int C, rem;
    mpz_fdiv_qr(C.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(),
                Int(4 * A).get_mpz_t());
    if (rem != 0)
        throw std::invalid_argument("not an invertible ideal");
    return reduce({A, B, C});
}

OIdeal ideal_of_form(const Ctx& cx, const BQForm& f) {
    Int b0 = cx.T == 0 ? Int(-f.F2 / 2) : Int(-(f.F2 + 1) / 2);
    mpz_fdiv_r(b0.get_mpz_t(), b0.get_mpz_t(), f.F1.get_mpz_t());
    return {f.F1, b0, 1};
}

// Gauss-reduce the ideal lattice and return (shortest vector, its norm).
std::pair<Vec, Int> shortest_vector(const Ctx& cx, const OIdeal& I) {
    Vec v1{I.a, 0}, v2{I.b, I.c};
    Int n1 = vec_qf(cx, v1), n2 = vec_qf(cx, v2);
    if (n1 > n2) {
        std::swap(v1, v2);
        std::swap(n1, n2);
    }
    for (int iter = 0; iter < 1000; ++iter) {
        Int b = vec_bilinear(cx, v1, v2);
        Int mu, two_n = 2 * n1;
        mpz_fdiv_q(mu.get_mpz_t(), Int(b + n1).get_mpz_t(),
                   two_n.get_mpz_t());
        v2.first -= mu * v1.first;
        v2.second -= mu * v1.second;
        n2 = vec_qf(cx, v2);
        if (n2 >= n1)
            return {v1, n1};
        std::swap(v1, v2);
        std::swap(n1, n2);
    }
    throw std::logic_error("lattice reduction failed to converge");
}

QuadElement element_of_vec(const Ctx& cx, const Vec& v) {
    QuadElement e;
    if (cx.T == 0) {
        e = {v.first, v.second, 1};
    } else {
        e = qe_reduce_denominator({2 * v.first + v.second, v.second, 2});
    }
    if (e.s < 0 || (e.s == 0 && e.t < 0)) {
        e.s = -e.s;
        e.t = -e.t;
    }
    return e;
}

std::vector<BQForm> class_group_impl(const Int& D) {
    Ctx cx = ctx_of_disc(D); // validates D
    (void)cx;
    std::vector<BQForm> forms;
    Int absD = -D;
    for (Int b = (mpz_fdiv_ui(D.get_mpz_t(), 2) == 0) ? 0 : 1;
         3 * b * b <= absD; b += 2) {
        Int M = (b * b + absD) / 4;
        for (Int a = b > 0 ? b : Int(1); a * a <= M; a += 1) {
            if (a == 0 || M % a != 0)
                continue;
            Int c = M / a;
            if (int_gcd(int_gcd(a, b), c) != 1)
                continue;
            forms.push_back({a, b, c});
            if (b > 0 && b < a && a < c)
                forms.push_back({a, -b, c});
        }
    }
    std::sort(forms.begin(), forms.end());
    return forms;
}

} // namespace

ImagQuadField make_field(uint32_t m) {
    if (m < 1)
        throw std::invalid_argument("radicand must be positive");
    for (const auto& [q, e] : arith::factorize(static_cast<uint64_t>(m))) {
        (void)q;
        if (e > 1)
            throw std::invalid_argument("radicand must be squarefree");
    }
    ImagQuadField K;
    K.m = m;
    if (m % 4 == 3) {
        K.D = -Int(m);
        K.omega_trace = 1;
        K.omega_norm = Int((m + 1) / 4);
    } else {
        K.D = -4 * Int(m);
        K.omega_trace = 0;
        K.omega_norm = Int(m);
    }
    K.w = (m == 1) ? 4 : (m == 3) ? 6 : 2;
    return K;
}

QuadElement qe_one() { return {1, 0, 1}; }

QuadElement qe_int(Int v) { return {std::move(v), 0, 1}; }

QuadElement qe_reduce_denominator(QuadElement e) {
    while (e.d % 2 == 0 && e.s % 2 == 0 && e.t % 2 == 0) {
        e.s /= 2;
        e.t /= 2;
        e.d /= 2;
    }
    assert(e.d == 1 || e.d == 2);
    return e;
}

QuadElement mul(const ImagQuadField& K, const QuadElement& x,
                const QuadElement& y) {
    QuadElement r;
    r.s = x.s * y.s - Int(K.m) * x.t * y.t;
    r.t = x.s * y.t + x.t * y.s;
    r.d = x.d * y.d;
    return qe_reduce_denominator(std::move(r));
}

QuadElement conj(const QuadElement& x) { return {x.s, -x.t, x.d}; }

QuadElement pow(const ImagQuadField& K, const QuadElement& x, uint32_t e) {
    QuadElement acc = qe_one();
    for (uint32_t i = 0; i < e; ++i)
        acc = mul(K, acc, x);
    return acc;
}

Int norm(const ImagQuadField& K, const QuadElement& x) {
    Int num = x.s * x.s + Int(K.m) * x.t * x.t;
    if (x.d == 2) {
        Int q, rem;
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(),
                    Int(4).get_mpz_t());
        if (rem != 0)
            throw std::invalid_argument("element is not an algebraic integer");
        return q;
    }
    return num;
}

Int trace(const QuadElement& x) {
    return x.d == 2 ? x.s : Int(2 * x.s);
}

SplitType split_type(const ImagQuadField& K, uint64_t q) {
    if (!arith::is_prime(q))
        throw std::invalid_argument("split_type wants a prime");
    if (q == 2) {
        if (K.m % 4 != 3)
            return SplitType::Ramified;
        return (K.m % 8 == 7) ? SplitType::Split : SplitType::Inert;
    }
    int chi = arith::legendre(-Int(K.m), q);
    if (chi == 0)
        return SplitType::Ramified;
    return chi == 1 ? SplitType::Split : SplitType::Inert;
}

std::vector<PrimeIdeal> primes_above(const ImagQuadField& K, uint64_t q) {
    SplitType ty = split_type(K, q);
    switch (ty) {
    case SplitType::Inert:
        return {{q, ty, 0}};
    case SplitType::Ramified: {
        uint64_t root = (q == 2) ? (K.m % 4 == 1 ? 1 : 0) : 0;
        return {{q, ty, root}};
    }
    case SplitType::Split: {
        if (q == 2)
            throw std::invalid_argument("split prime 2 not supported");
        uint64_t mm = K.m % q;
        auto r = arith::sqrt_mod((q - mm) % q, q);
        assert(r.has_value() && *r != 0);
        return {{q, ty, *r}, {q, ty, q - *r}};
    }
    }
    throw std::logic_error("unreachable");
}

PrimeIdeal conjugate_ideal(const PrimeIdeal& P) {
    if (P.type == SplitType::Split)
        return {P.q, P.type, P.q - P.root};
    return P;
}

int64_t ord_at(const ImagQuadField& K, const QuadElement& x,
               const PrimeIdeal& P) {
    if (x.s == 0 && x.t == 0)
        throw std::invalid_argument("ord of zero");
    uint64_t q = P.q;
    Int qz = static_cast<unsigned long>(q);
    int64_t denom_ord = 0;
    if (x.d == 2 && q == 2) {
        if (P.type == SplitType::Split)
            throw std::invalid_argument("split prime 2 not supported");
        denom_ord = (P.type == SplitType::Ramified) ? 2 : 1;
    }
    Int nrm = x.s * x.s + Int(K.m) * x.t * x.t; // norm of the numerator
    int64_t num_ord = 0;
    switch (P.type) {
    case SplitType::Ramified:
        num_ord = arith::valuation(nrm, qz);
        break;
    case SplitType::Inert: {
        unsigned v = mpz_divisible_p(nrm.get_mpz_t(), qz.get_mpz_t())
                         ? arith::valuation(nrm, qz)
                         : 0;
        assert(v % 2 == 0);
        num_ord = v / 2;
        break;
    }
    case SplitType::Split: {
        Int g = int_gcd(x.s, x.t);
        unsigned j = mpz_divisible_p(g.get_mpz_t(), qz.get_mpz_t())
                         ? arith::valuation(g, qz)
                         : 0;
        Int qj = arith::pow_int(qz, j);
        Int s1, t1;
        mpz_divexact(s1.get_mpz_t(), x.s.get_mpz_t(), qj.get_mpz_t());
        mpz_divexact(t1.get_mpz_t(), x.t.get_mpz_t(), qj.get_mpz_t());
        uint64_t hit = (mpz_fdiv_ui(s1.get_mpz_t(), q) +
                        arith::mulmod(mpz_fdiv_ui(t1.get_mpz_t(), q),
                                      P.root % q, q)) %
                       q;
        if (hit != 0) {
            num_ord = j;
        } else {
            Int n1 = s1 * s1 + Int(K.m) * t1 * t1;
            num_ord = j + arith::valuation(n1, qz);
        }
        break;
    }
    }
    return num_ord - denom_ord;
}

uint64_t residue(const ImagQuadField& K, const QuadElement& x,
                 const PrimeIdeal& P) {
    (void)K;
    if (P.type == SplitType::Inert)
        throw std::invalid_argument("residue field of an inert prime is not F_q");
    uint64_t q = P.q;
    if (x.d == 2 && q == 2)
        throw std::invalid_argument("denominator not invertible mod 2");
    uint64_t v = (mpz_fdiv_ui(x.s.get_mpz_t(), q) +
                  arith::mulmod(mpz_fdiv_ui(x.t.get_mpz_t(), q), P.root % q,
                                q)) %
                 q;
    if (x.d == 2)
        v = arith::mulmod(v, arith::invmod(2, q), q);
    return v;
}

Int discriminant(const BQForm& f) {
    return f.F2 * f.F2 - 4 * f.F1 * f.F3;
}

bool is_reduced(const BQForm& f) {
    Int ab = abs(f.F2);
    if (!(ab <= f.F1 && f.F1 <= f.F3))
        return false;
    if ((ab == f.F1 || f.F1 == f.F3) && f.F2 < 0)
        return false;
    return true;
}

BQForm reduce(BQForm f) {
    if (f.F1 <= 0 || discriminant(f) >= 0)
        throw std::invalid_argument("form must be positive definite");
    Int D = discriminant(f);
    for (;;) {
        // normalize F2 into (-F1, F1]
        Int twoa = 2 * f.F1;
        Int r;
        mpz_fdiv_r(r.get_mpz_t(), f.F2.get_mpz_t(), twoa.get_mpz_t());
        if (r > f.F1)
            r -= twoa;
        f.F2 = r;
        f.F3 = (f.F2 * f.F2 - D) / (4 * f.F1);
        if (f.F1 > f.F3) {
            f = {f.F3, -f.F2, f.F1};
            continue;
        }
        if (f.F1 == f.F3 && f.F2 < 0)
            f.F2 = -f.F2;
        return f;
    }
}

BQForm principal_form(const Int& D) {
    Ctx cx = ctx_of_disc(D);
    if (cx.T == 0)
        return {1, 0, -D / 4};
    return {1, 1, (1 - D) / 4};
}

std::vector<BQForm> class_group(const Int& D) { return class_group_impl(D); }

BQForm compose(const Int& D, const BQForm& f, const BQForm& g) {
    Ctx cx = ctx_of_disc(D);
    if (discriminant(f) != D || discriminant(g) != D)
        throw std::invalid_argument("discriminant mismatch");
    return form_of(cx, ideal_mul(cx, ideal_of_form(cx, f),
                                 ideal_of_form(cx, g)));
}

Int ideal_norm(const OIdeal& I) { return I.a * I.c; }

OIdeal ideal_one() { return {1, 0, 1}; }

OIdeal ideal_of_prime(const ImagQuadField& K, const PrimeIdeal& P) {
    Int qz = static_cast<unsigned long>(P.q);
    if (P.type == SplitType::Inert)
        return {qz, 0, qz};
    if (P.q == 2) {
        // ramified 2 (split 2 is rejected upstream): omega = sqrt(-m)
        return {2, Int(static_cast<unsigned long>(P.root % 2)), 1};
    }
    uint64_t wr; // omega ≡ wr (mod P)
    if (K.omega_trace == 0) {
        wr = P.root % P.q;
    } else {
        wr = arith::mulmod((1 + P.root) % P.q, arith::invmod(2, P.q), P.q);
    }
    uint64_t b = (P.q - wr) % P.q;
    return {qz, Int(static_cast<unsigned long>(b)), 1};
}

OIdeal mul(const ImagQuadField& K, const OIdeal& I, const OIdeal& J) {
    return ideal_mul(ctx_of_field(K), I, J);
}

OIdeal pow(const ImagQuadField& K, const OIdeal& I, uint32_t e) {
    Ctx cx = ctx_of_field(K);
    OIdeal acc = ideal_one();
    for (uint32_t i = 0; i < e; ++i)
        acc = ideal_mul(cx, acc, I);
    return acc;
}

BQForm form_of_ideal(const ImagQuadField& K, const OIdeal& I) {
    return form_of(ctx_of_field(K), I);
}

std::optional<QuadElement> principal_generator(const ImagQuadField& K,
                                               const OIdeal& I) {
    Ctx cx = ctx_of_field(K);
    auto [v, n] = shortest_vector(cx, I);
    if (n != ideal_norm(I))
        return std::nullopt;
    return element_of_vec(cx, v);
}

uint32_t class_number(const ImagQuadField& K) {
    static std::map<Int, uint32_t> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(K.D);
    if (it == cache.end())
        it = cache.emplace(K.D, class_group_impl(K.D).size()).first;
    return it->second;
}

uint32_t class_order(const ImagQuadField& K, const PrimeIdeal& P) {
    Ctx cx = ctx_of_field(K);
    BQForm one = principal_form(K.D);
    BQForm f = form_of(cx, ideal_of_prime(K, P));
    BQForm acc = f;
    uint32_t h = class_number(K);
    for (uint32_t k = 1; k <= h; ++k) {
        if (acc == one)
            return k;
        acc = compose(K.D, acc, f);
    }
    throw std::logic_error("class order exceeds class number");
}

std::optional<std::vector<QuadElement>>
selmer_set(const ImagQuadField& K, const std::vector<PrimeIdeal>& S,
           uint32_t p) {
    uint32_t h = class_number(K);
    if (h % p == 0 || K.w % p == 0)
        return std::nullopt;
    std::vector<QuadElement> gens;
    gens.reserve(S.size());
    for (const auto& P : S) {
        uint32_t k = class_order(K, P);
        auto g = principal_generator(K, pow(K, ideal_of_prime(K, P), k));
        assert(g.has_value()); // [P]^k is the trivial class
        gens.push_back(std::move(*g));
    }
    return gens;
}

} // namespace quadfield
} // namespace cubesum
