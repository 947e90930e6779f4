#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cubesum/arith.hpp"

using namespace cubesum;

namespace {

// independent naive reference implementations

bool naive_is_prime(uint64_t n) {
    if (n < 2)
        return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::vector<std::pair<uint64_t, unsigned>> naive_factor(uint64_t n) {
    std::vector<std::pair<uint64_t, unsigned>> out;
    for (uint64_t d = 2; d * d <= n; ++d) {
        unsigned e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e)
            out.emplace_back(d, e);
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

} // namespace

TEST_CASE("primality agrees with trial division") {
    for (uint64_t n = 0; n < 3000; ++n)
        CHECK(arith::is_prime(n) == naive_is_prime(n));
    // Miller-Rabin favourites
    CHECK(!arith::is_prime(uint64_t{3215031751ull}));
    CHECK(arith::is_prime(uint64_t{2305843009213693951ull})); // 2^61 - 1
    CHECK(!arith::is_prime(uint64_t{2305843009213693953ull}));
}

TEST_CASE("prime tables") {
    const auto& ps = arith::small_primes();
    CHECK(ps.front() == 2);
    CHECK(ps.size() == 78498); // pi(10^6)
    CHECK(ps.back() == 999983);

    const auto& spf = arith::spf_table();
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 2000; ++i) {
        uint32_t n = 2 + rng() % 999999u;
        uint32_t f = spf[n];
        CHECK(n % f == 0);
        CHECK(naive_is_prime(f));
        for (uint32_t d = 2; d < f; ++d)
            REQUIRE(n % d != 0);
    }

    auto mid = arith::primes_in_range(1000, 2000);
    std::vector<uint32_t> expect;
    for (uint32_t q = 1000; q < 2000; ++q)
        if (naive_is_prime(q))
            expect.push_back(q);
    CHECK(mid == expect);
    CHECK(arith::primes_in_range(17, 18) == std::vector<uint32_t>{17});
    CHECK(arith::primes_in_range(24, 29).empty());
}

TEST_CASE("modular arithmetic against gmp") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) {
        uint64_t m = (rng() % ((uint64_t{1} << 62) - 2)) + 2;
        uint64_t a = rng() % m, b = rng() % m;
        Int am = a, bm = b, mm = m;
        CHECK(arith::mulmod(a, b, m) == mpz_class(am * bm % mm).get_ui());
        uint64_t e = rng() % 1000;
        Int pw;
        mpz_powm_ui(pw.get_mpz_t(), am.get_mpz_t(), e, mm.get_mpz_t());
        CHECK(arith::powmod(a, e, m) == pw.get_ui());
    }
}

TEST_CASE("invmod") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        uint64_t m = (rng() % 1000000) + 2;
        uint64_t a = rng() % m;
        if (std::gcd(a, m) == 1 && a != 0) {
            uint64_t inv = arith::invmod(a, m);
            CHECK(arith::mulmod(a, inv, m) == 1);
        } else {
            CHECK_THROWS_AS((void)arith::invmod(a, m),
                            std::invalid_argument);
        }
    }
}

TEST_CASE("factorization matches naive trial division") {
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 400; ++i) {
        uint64_t n = 1 + rng() % 5000000;
        auto got = arith::factorize(n);
        auto want = naive_factor(n);
        REQUIRE(got.size() == want.size());
        for (size_t j = 0; j < got.size(); ++j) {
            CHECK(got[j].first == want[j].first);
            CHECK(got[j].second == want[j].second);
        }
    }
    // Int overload, recomposition check on wide values
    for (int i = 0; i < 50; ++i) {
        Int n = 1;
        for (int j = 0; j < 6; ++j)
            n *= (1 + rng() % 1000);
        Int prod = 1;
        for (const auto& [q, e] : arith::factorize(n)) {
            CHECK(arith::is_prime(q));
            prod *= arith::pow_int(q, e);
        }
        CHECK(prod == n);
    }
}

TEST_CASE("factorize rejects uncertifiable cofactors") {
    // product of two primes > 10^6, not a prime power
    Int n = Int(1000003) * Int(1000033);
    CHECK_THROWS_AS((void)arith::factorize(n), arith::OutOfCertifiedRange);
    // large prime and large prime power still work
    Int q = 1000003;
    CHECK(arith::factorize(q).size() == 1);
    auto f = arith::factorize(q * q);
    REQUIRE(f.size() == 1);
    CHECK(f[0].second == 2);
}

TEST_CASE("radical, valuation, squarefree split") {
    CHECK(arith::radical(1) == 1);
    CHECK(arith::radical(Int(720)) == 30);
    CHECK(arith::valuation(Int(720), Int(2)) == 4);
    CHECK(arith::valuation(Int(720), Int(5)) == 1);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        Int n = 1 + rng() % 4000000;
        auto [m, k] = arith::squarefree_decompose(n);
        CHECK(m * k * k == n);
        for (const auto& [q, e] : arith::factorize(m))
            CHECK(e == 1);
    }
}

TEST_CASE("square roots mod q against exhaustive search") {
    for (uint64_t q : {3u, 5u, 7u, 11u, 13u, 17u, 101u, 997u}) {
        for (uint64_t a = 0; a < q; ++a) {
            std::vector<uint64_t> roots;
            for (uint64_t x = 0; x < q; ++x)
                if (x * x % q == a)
                    roots.push_back(x);
            auto got = arith::sqrt_mod(a, q);
            if (roots.empty()) {
                CHECK(!got);
            } else {
                REQUIRE(got.has_value());
                CHECK(*got == roots.front()); // smaller root
            }
        }
    }
}

TEST_CASE("legendre symbol via euler criterion") {
    std::mt19937_64 rng(5);
    for (uint64_t q : {3u, 7u, 31u, 101u, 4999u}) {
        for (int i = 0; i < 200; ++i) {
            Int a = Int(rng() % (4 * q)) - Int(2 * q);
            int ls = arith::legendre(a, q);
            uint64_t am = mpz_fdiv_ui(a.get_mpz_t(), q);
            if (am == 0) {
                CHECK(ls == 0);
            } else {
                uint64_t e = arith::powmod(am, (q - 1) / 2, q);
                CHECK(ls == (e == 1 ? 1 : -1));
            }
        }
    }
}

TEST_CASE("kronecker extends legendre") {
    for (int d = -30; d <= 30; ++d) {
        for (uint64_t q : {3u, 5u, 7u, 13u}) {
            CHECK(arith::kronecker(Int(d), Int(q)) ==
                  arith::legendre(Int(d), q));
        }
    }
    CHECK(arith::kronecker(Int(-8), Int(3)) == 1);  // -8 = 1 mod 3
    CHECK(arith::kronecker(Int(-20), Int(11)) == -1);
}

TEST_CASE("exact p-th roots") {
    std::mt19937_64 rng(17);
    for (unsigned long p : {3ul, 5ul, 7ul, 11ul}) {
        for (int i = 0; i < 100; ++i) {
            Int x = rng() % 100000;
            Int n = arith::pow_int(x, p);
            auto r = arith::pth_root_exact(n, p);
            REQUIRE(r.has_value());
            CHECK(*r == x);
            if (n > 1)
                CHECK(!arith::pth_root_exact(n + 1, p).has_value());
        }
    }
}
