#include <doctest.h>

#include <random>

#include "cubesum/casesplit.hpp"

using namespace cubesum;
using casesplit::Rejected;
using casesplit::SolutionCandidate;

TEST_CASE("case classification is total and matches parity/divisibility") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 2000; ++i) {
        Int x = Int(rng() % 2000000) - 1000000;
        if (x == 0)
            continue;
        Case c = casesplit::case_for(x);
        CHECK(casesplit::x_even(c) == (x % 2 == 0));
        CHECK(casesplit::x_div3(c) == (x % 3 == 0));
    }
    CHECK(casesplit::case_for(Int(6)) == Case::C1);
    CHECK(casesplit::case_for(Int(2)) == Case::C2);
    CHECK(casesplit::case_for(Int(3)) == Case::C3);
    CHECK(casesplit::case_for(Int(1)) == Case::C4);
    CHECK(casesplit::case_for(Int(-5)) == Case::C4);
}

TEST_CASE("admissibility constraints") {
    for (uint32_t r = 1; r <= 60; ++r) {
        CHECK(casesplit::admissible(Case::C1, r) ==
              (r % 2 == 1 && r % 3 != 0));
        CHECK(casesplit::admissible(Case::C2, r) ==
              (r % 2 == 1 && r % 3 != 0));
        CHECK(casesplit::admissible(Case::C3, r) == (r % 3 != 0));
        CHECK(casesplit::admissible(Case::C4, r) == (r % 3 != 0));
    }
    CHECK_THROWS_AS(
        (void)casesplit::build_case_equation(Case::C1, 2, 5),
        InadmissibleR);
    CHECK_THROWS_AS(
        (void)casesplit::build_case_equation(Case::C3, 9, 5),
        InadmissibleR);
}

TEST_CASE("ternary equation shapes") {
    for (uint32_t p : {5u, 7u, 11u}) {
        Int p2 = arith::pow_int(Int(2), 2 * p - 3);
        Int p3 = arith::pow_int(Int(3), 2 * p - 2);
        Int m3 = arith::pow_int(Int(3), p - 1);
        for (uint32_t r : {1u, 5u, 25u}) {
            auto e1 = casesplit::build_case_equation(Case::C1, r, p);
            CHECK(e1.a == 1);
            CHECK(e1.b == p2 * p3);
            CHECK(e1.c == Int(r) * r);
            auto e2 = casesplit::build_case_equation(Case::C2, r, p);
            CHECK(e2.a == m3);
            CHECK(e2.b == p2);
            CHECK(e2.c == Int(r) * r);
            auto e3 = casesplit::build_case_equation(Case::C3, r, p);
            CHECK(e3.a == 1);
            CHECK(e3.b == p3);
            CHECK(e3.c == 2 * Int(r) * r);
            auto e4 = casesplit::build_case_equation(Case::C4, r, p);
            CHECK(e4.a == m3);
            CHECK(e4.b == 1);
            CHECK(e4.c == 2 * Int(r) * r);
            for (const auto& e : {e1, e2, e3, e4}) {
                Int g;
                mpz_gcd(g.get_mpz_t(), e.a.get_mpz_t(), e.b.get_mpz_t());
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.c.get_mpz_t());
                CHECK(g == 1);
            }
        }
    }
}

TEST_CASE("multiplier and cofactor glue to the ternary equation") {
    // With x = mult * y1^p and x^2 + 2r^2 = cof * y2^p, eliminating x gives
    //   cof * y2^p - mult^2 * y1^(2p) = 2 r^2
    // and the stored (a, b, c) is that equation divided by cof/a (2 for the
    // even-x cases, 1 otherwise).  Verify on sampled y1, y2.
    std::mt19937_64 rng(4242);
    for (uint32_t p : {5u, 7u}) {
        for (Case c : {Case::C1, Case::C2, Case::C3, Case::C4}) {
            Int mult = casesplit::x_multiplier(c, p);
            Int cof = casesplit::cofactor_coeff(c, p);
            auto eq = casesplit::build_case_equation(c, 1, p);
            REQUIRE(cof % eq.a == 0);
            Int scale = cof / eq.a;
            CHECK(eq.b * scale == mult * mult);
            CHECK(eq.c * scale == 2); // c at r = 1, times the scale
            for (int i = 0; i < 20; ++i) {
                Int y1 = 1 + rng() % 50, y2 = 1 + rng() % 50;
                Int full = cof * arith::pow_int(y2, p) -
                           mult * mult * arith::pow_int(y1, 2 * p);
                Int reduced = eq.a * arith::pow_int(y2, p) -
                              eq.b * arith::pow_int(y1, 2 * p);
                CHECK(full == scale * reduced);
            }
        }
    }
}

TEST_CASE("reconstruction accepts a genuine cube (p = 3 sanity)") {
    auto res = casesplit::reconstruct_solution(Case::C4, 2, 3, 1, 1);
    REQUIRE(std::holds_alternative<SolutionCandidate>(res));
    const auto& sol = std::get<SolutionCandidate>(res);
    CHECK(sol.x == 1);
    CHECK(sol.y == 3);
    Int lhs = (sol.x - 2) * (sol.x - 2) * (sol.x - 2) +
              sol.x * sol.x * sol.x +
              (sol.x + 2) * (sol.x + 2) * (sol.x + 2);
    CHECK(lhs == sol.y * sol.y * sol.y);
}

TEST_CASE("reconstruction rejections fire in order") {
    // identity broken
    auto bad = casesplit::reconstruct_solution(Case::C4, 1, 5, 1, 1);
    REQUIRE(std::holds_alternative<Rejected>(bad));
    CHECK(std::get<Rejected>(bad).reason ==
          casesplit::RejectReason::IdentityMismatch);

    // y1 = 0 makes x = y = 0: the identity holds trivially
    auto triv = casesplit::reconstruct_solution(Case::C4, 7, 5, 0, 0);
    REQUIRE(std::holds_alternative<Rejected>(triv));
    CHECK(std::get<Rejected>(triv).reason ==
          casesplit::RejectReason::Trivial);

    // the fixture pullback: identity holds, x*y != 0, but gcd(81, 162) = 81
    auto gcd = casesplit::reconstruct_solution(Case::C3, 162, 5, 1, 9);
    REQUIRE(std::holds_alternative<Rejected>(gcd));
    CHECK(std::get<Rejected>(gcd).reason ==
          casesplit::RejectReason::GcdViolation);
}
