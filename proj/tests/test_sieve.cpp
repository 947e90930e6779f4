#include <doctest.h>

#include <set>

#include "cubesum/sieve.hpp"

using namespace cubesum;

namespace {

// all values a*rho^p - b*sigma^(2p) mod q, by brute force
std::set<uint64_t> attained_values(const TernaryEquation& eq, uint64_t q) {
    uint64_t am = mpz_fdiv_ui(eq.a.get_mpz_t(), q);
    uint64_t bm = mpz_fdiv_ui(eq.b.get_mpz_t(), q);
    std::set<uint64_t> out;
    for (uint64_t rho = 0; rho < q; ++rho) {
        uint64_t t1 = arith::mulmod(am, arith::powmod(rho, eq.p, q), q);
        for (uint64_t sig = 0; sig < q; ++sig) {
            uint64_t t2 =
                arith::mulmod(bm, arith::powmod(sig, 2 * eq.p, q), q);
            out.insert((t1 + q - t2) % q);
        }
    }
    return out;
}

} // namespace

TEST_CASE("generator and unity roots by exhaustion") {
    for (uint64_t q : {11ull, 31ull, 41ull, 71ull, 211ull}) {
        uint64_t g = sieve::generator(q);
        std::set<uint64_t> seen;
        uint64_t cur = 1;
        for (uint64_t i = 0; i + 1 < q; ++i) {
            seen.insert(cur);
            cur = arith::mulmod(cur, g, q);
        }
        CHECK(seen.size() == q - 1); // primitive

        for (uint64_t d = 1; d < q; ++d) {
            if ((q - 1) % d != 0)
                continue;
            auto roots = sieve::unity_roots_with_zero(q, d);
            std::vector<uint64_t> expect{0};
            for (uint64_t x = 1; x < q; ++x)
                if (arith::powmod(x, d, q) == 1)
                    expect.push_back(x);
            CHECK(roots == expect); // both sorted ascending
        }
    }
}

TEST_CASE("witness primes enumerate exactly q = 2kp+1 prime, q not | a") {
    for (uint32_t p : {5u, 7u, 11u}) {
        Int a = arith::pow_int(Int(3), p - 1);
        auto ws = sieve::witness_primes(p, a, 40);
        std::vector<uint64_t> expect;
        for (uint64_t k = 1; k <= 40; ++k) {
            uint64_t q = 2 * k * p + 1;
            if (arith::is_prime(q) && mpz_fdiv_ui(a.get_mpz_t(), q) != 0)
                expect.push_back(q);
        }
        std::vector<uint64_t> got;
        for (const auto& w : ws) {
            CHECK(w.q == 2 * w.k * p + 1);
            got.push_back(w.q);
        }
        CHECK(got == expect);
    }
}

TEST_CASE("mu set is exactly the image of 2p-th powers") {
    for (uint32_t p : {5u, 7u}) {
        for (const auto& w : sieve::witness_primes(p, Int(1), 5)) {
            auto mu = sieve::mu_set(p, w);
            std::set<uint64_t> expect;
            for (uint64_t x = 0; x < w.q; ++x)
                expect.insert(arith::powmod(x, 2 * p, w.q));
            std::vector<uint64_t> ev(expect.begin(), expect.end());
            CHECK(mu == ev);
            CHECK(mu.size() == w.k + 1);
        }
    }
}

TEST_CASE("empty B(p,q) if and only if c is unattained mod q") {
    // soundness both ways, by full residue enumeration
    for (Case label : {Case::C3, Case::C4}) {
        for (uint32_t p : {5u, 7u}) {
            for (uint32_t r = 1; r <= 40; ++r) {
                if (!casesplit::admissible(label, r))
                    continue;
                auto eq = casesplit::build_case_equation(label, r, p);
                for (const auto& w : sieve::witness_primes(p, eq.a, 5)) {
                    auto attained = attained_values(eq, w.q);
                    uint64_t cm = mpz_fdiv_ui(eq.c.get_mpz_t(), w.q);
                    bool reachable = attained.count(cm) > 0;
                    auto B = sieve::b_set(eq, w);
                    REQUIRE(B.empty() == !reachable);
                }
            }
        }
    }
}

TEST_CASE("context scan matches the one-shot scan") {
    for (Case label : {Case::C3, Case::C4}) {
        for (uint32_t p : {5u, 7u, 11u}) {
            auto base = casesplit::build_case_equation(label, 1, p);
            auto ctxs = sieve::witness_contexts(p, base.a, base.b, 25);
            for (uint32_t r = 1; r <= 60; ++r) {
                if (!casesplit::admissible(label, r))
                    continue;
                auto eq = casesplit::build_case_equation(label, r, p);
                auto direct = sieve::sieve_pp2(eq, 25);
                auto cached = sieve::sieve_with_contexts(ctxs, eq.c);
                CHECK(direct.eliminated == cached.eliminated);
                CHECK(direct.witness_q == cached.witness_q);
            }
        }
    }
}

TEST_CASE("witness dividing the leading coefficient is rejected") {
    auto eq = casesplit::build_case_equation(Case::C4, 1, 5);
    // q = 11 = 2*1*5 + 1 divides nothing here; force a fake equation
    TernaryEquation bad = eq;
    bad.a = 11;
    CHECK_THROWS_AS((void)sieve::b_set(bad, WitnessPrime{11, 1}),
                    WitnessInvalid);
}
