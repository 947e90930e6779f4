#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace cubesum {

using Int = mpz_class;

namespace arith {

// Thrown when a factorization or primality query falls outside the range the
// routines can certify.
struct OutOfCertifiedRange : std::domain_error {
    using std::domain_error::domain_error;
};

// Primes below 1'000'000, ascending.  Built once, immutable afterwards.
const std::vector<uint32_t>& small_primes();

// Smallest prime factor for every n <= 1'000'000 (index 0 and 1 unused).
const std::vector<uint32_t>& spf_table();

// Primes p with lo <= p < hi, via the sieve (requires hi <= 1'000'000).
std::vector<uint32_t> primes_in_range(uint32_t lo, uint32_t hi);

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);
// Inverse of a modulo m; throws std::invalid_argument if gcd(a, m) != 1.
uint64_t invmod(uint64_t a, uint64_t m);

// Deterministic Miller-Rabin.  The fixed base set certifies every input
// below 3.3e24, which covers uint64_t entirely.
bool is_prime(uint64_t n);
// Same certificate range; larger inputs raise OutOfCertifiedRange.
bool is_prime(const Int& n);

using Factorization = std::vector<std::pair<Int, unsigned>>;

// Prime factorization, ascending primes.  Trial division by the sieve primes,
// then the cofactor must be 1, a prime, or a prime power; anything harder
// raises OutOfCertifiedRange.  n >= 1.
Factorization factorize(const Int& n);
std::vector<std::pair<uint64_t, unsigned>> factorize(uint64_t n);

// Product of the distinct primes dividing n.  radical(1) = 1.
Int radical(const Int& n);

// n = m * k^2 with m squarefree; returns (m, k).
std::pair<Int, Int> squarefree_decompose(const Int& n);

// Smaller square root of a modulo prime q, or nullopt when a is a
// non-residue.  a is reduced mod q first; sqrt_mod(0, q) = 0.
std::optional<uint64_t> sqrt_mod(uint64_t a, uint64_t q);

// Legendre symbol (a/q) for odd prime q, values in {-1, 0, 1}.
int legendre(const Int& a, uint64_t q);

// Kronecker symbol (d/n).
int kronecker(const Int& d, const Int& n);

// Exponent of prime in n (n != 0).
unsigned valuation(const Int& n, const Int& prime);

// Exact p-th root when n is a perfect p-th power (n >= 0), else nullopt.
std::optional<Int> pth_root_exact(const Int& n, unsigned long p);

Int pow_int(const Int& base, unsigned long exp);

} // namespace arith
} // namespace cubesum
