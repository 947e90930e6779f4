#include "cubesum/arith.hpp"

#include <algorithm>
#include <cassert>

namespace cubesum {
namespace arith {

namespace {

constexpr uint32_t SIEVE_LIMIT = 1'000'000;

std::vector<uint32_t> build_spf() {
    std::vector<uint32_t> spf(SIEVE_LIMIT + 1, 0);
    for (uint32_t i = 2; i <= SIEVE_LIMIT; ++i) {
        if (spf[i] == 0) {
            for (uint64_t j = i; j <= SIEVE_LIMIT; j += i)
                if (spf[j] == 0) spf[j] = i;
        }
    }
    return spf;
}

} // namespace

const std::vector<uint32_t>& spf_table() {
    static const std::vector<uint32_t> table = build_spf();
    return table;
}

const std::vector<uint32_t>& small_primes() {
    static const std::vector<uint32_t> primes = [] {
        const auto& spf = spf_table();
        std::vector<uint32_t> ps;
        ps.reserve(80000);
        for (uint32_t i = 2; i <= SIEVE_LIMIT; ++i)
            if (spf[i] == i) ps.push_back(i);
        return ps;
    }();
    return primes;
}

std::vector<uint32_t> primes_in_range(uint32_t lo, uint32_t hi) {
    if (hi > SIEVE_LIMIT + 1)
        throw std::invalid_argument("primes_in_range: hi beyond sieve limit");
    const auto& ps = small_primes();
    auto first = std::lower_bound(ps.begin(), ps.end(), lo);
    auto last = std::lower_bound(ps.begin(), ps.end(), hi);
    return std::vector<uint32_t>(first, last);
}

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
    if (m == 1) return 0;
    uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

uint64_t invmod(uint64_t a, uint64_t m) {
    // extended Euclid on signed 128-bit to dodge overflow
    __int128 t = 0, newt = 1;
    __int128 r = m, newr = a % m;
    while (newr != 0) {
        __int128 q = r / newr;
        std::swap(t, newt);
        newt -= q * t;
        std::swap(r, newr);
        newr -= q * r;
    }
    if (r != 1) throw std::invalid_argument("invmod: not invertible");
    if (t < 0) t += m;
    return static_cast<uint64_t>(t);
}

namespace {

// Base set certifying Miller-Rabin below 3.3e24 (Sorenson-Webster).
constexpr uint64_t MR_BASES[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool miller_rabin_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                       23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (uint64_t a : MR_BASES) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

} // namespace

bool is_prime(uint64_t n) { return miller_rabin_u64(n); }

bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_prime(static_cast<uint64_t>(n.get_ui()));
    static const Int certified_limit = [] {
        Int lim = 33;
        Int e;
        mpz_ui_pow_ui(e.get_mpz_t(), 10, 23);
        return Int(lim * e); // 3.3e24
    }();
    if (n >= certified_limit)
        throw OutOfCertifiedRange("is_prime: input beyond certified range");
    // Deterministic for this range with the fixed base set.
    for (uint64_t p : MR_BASES)
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return n == p;
    Int d = n - 1;
    int s = 0;
    while (mpz_even_p(d.get_mpz_t())) { d >>= 1; ++s; }
    for (uint64_t a : MR_BASES) {
        Int x, base = a;
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = (x * x) % n;
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<std::pair<uint64_t, unsigned>> factorize(uint64_t n) {
    if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
    std::vector<std::pair<uint64_t, unsigned>> out;
    if (n <= SIEVE_LIMIT) {
        const auto& spf = spf_table();
        while (n > 1) {
            uint64_t p = spf[n];
            unsigned e = 0;
            while (n % p == 0) { n /= p; ++e; }
            out.emplace_back(p, e);
        }
        return out;
    }
    for (uint32_t p : small_primes()) {
        if (static_cast<uint64_t>(p) * p > n) break;
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) { n /= p; ++e; }
            out.emplace_back(p, e);
        }
    }
    if (n > 1) {
        if (is_prime(n)) {
            out.emplace_back(n, 1u);
        } else {
            // composite cofactor with no factor below the trial bound:
            // certifiable only when it is a perfect power of a prime
            Int m = static_cast<unsigned long>(n);
            if (!mpz_perfect_power_p(m.get_mpz_t()))
                throw OutOfCertifiedRange("factorize: cofactor not prime after trial division");
            for (unsigned long e = 2;; ++e) {
                Int root;
                if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), e) != 0 &&
                    is_prime(root)) {
                    out.emplace_back(root.get_ui(), static_cast<unsigned>(e));
                    break;
                }
                if (root < 2)
                    throw OutOfCertifiedRange("factorize: cofactor not prime after trial division");
            }
        }
    }
    return out;
}

Factorization factorize(const Int& n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
    if (n.fits_ulong_p()) {
        Factorization out;
        for (auto& [p, e] : factorize(static_cast<uint64_t>(n.get_ui())))
            out.emplace_back(Int(static_cast<unsigned long>(p)), e);
        return out;
    }
    Factorization out;
    Int m = n;
    for (uint32_t p : small_primes()) {
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            Int pz = static_cast<unsigned long>(p);
            Int rest;
            auto e = mpz_remove(rest.get_mpz_t(), m.get_mpz_t(), pz.get_mpz_t());
            m = rest;
            out.emplace_back(pz, static_cast<unsigned>(e));
        }
        if (m == 1) break;
        Int p2 = Int(static_cast<unsigned long>(p)) * p;
        if (p2 > m) break;
    }
    if (m > 1) {
        // cofactor: prime or a perfect power of a prime, else give up
        if (is_prime(m)) {
            out.emplace_back(m, 1u);
        } else if (mpz_perfect_power_p(m.get_mpz_t())) {
            unsigned long e = 2;
            Int root;
            for (;; ++e) {
                if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), e) != 0) {
                    if (is_prime(root)) break;
                    // keep raising the exponent: e.g. p^4 hit at e=2 gives p^2
                }
                if (root < 2)
                    throw OutOfCertifiedRange("factorize: composite cofactor resists");
            }
            out.emplace_back(root, static_cast<unsigned>(e));
        } else {
            throw OutOfCertifiedRange("factorize: composite cofactor resists");
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

Int radical(const Int& n) {
    Int rad = 1;
    for (const auto& [p, e] : factorize(n)) rad *= p;
    return rad;
}

std::pair<Int, Int> squarefree_decompose(const Int& n) {
    Int m = 1, k = 1;
    for (const auto& [p, e] : factorize(n)) {
        if (e & 1) m *= p;
        for (unsigned i = 0; i < e / 2; ++i) k *= p;
    }
    return {m, k};
}

std::optional<uint64_t> sqrt_mod(uint64_t a, uint64_t q) {
    a %= q;
    if (a == 0) return 0;
    if (q == 2) return a;
    if (powmod(a, (q - 1) / 2, q) != 1) return std::nullopt; // Euler criterion
    uint64_t root;
    if (q % 4 == 3) {
        root = powmod(a, (q + 1) / 4, q);
    } else {
        // Tonelli-Shanks
        uint64_t s = q - 1;
        int e = 0;
        while ((s & 1) == 0) { s >>= 1; ++e; }
        uint64_t n = 2;
        while (powmod(n, (q - 1) / 2, q) != q - 1) ++n;
        uint64_t x = powmod(a, (s + 1) / 2, q);
        uint64_t b = powmod(a, s, q);
        uint64_t g = powmod(n, s, q);
        int r = e;
        for (;;) {
            uint64_t t = b;
            int m = 0;
            while (t != 1 && m < r) { t = mulmod(t, t, q); ++m; }
            if (m == 0) { root = x; break; }
            uint64_t gs = powmod(g, 1ull << (r - m - 1), q);
            g = mulmod(gs, gs, q);
            x = mulmod(x, gs, q);
            b = mulmod(b, g, q);
            r = m;
        }
    }
    return std::min(root, q - root);
}

int legendre(const Int& a, uint64_t q) {
    Int qz = static_cast<unsigned long>(q);
    return mpz_legendre(a.get_mpz_t(), qz.get_mpz_t());
}

int kronecker(const Int& d, const Int& n) {
    return mpz_kronecker(d.get_mpz_t(), n.get_mpz_t());
}

unsigned valuation(const Int& n, const Int& prime) {
    if (n == 0) throw std::invalid_argument("valuation: n must be nonzero");
    Int m;
    return static_cast<unsigned>(
        mpz_remove(m.get_mpz_t(), n.get_mpz_t(), prime.get_mpz_t()));
}

std::optional<Int> pth_root_exact(const Int& n, unsigned long p) {
    if (n < 0) throw std::invalid_argument("pth_root_exact: n must be >= 0");
    Int root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), p) != 0) return root;
    return std::nullopt;
}

Int pow_int(const Int& base, unsigned long exp) {
    Int out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

} // namespace arith
} // namespace cubesum
