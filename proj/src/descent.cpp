#include "cubesum/descent.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <map>
#include <mutex>
#include <set>
#include <tuple>

#include "cubesum/sieve.hpp"

namespace cubesum {
namespace descent {

namespace {

using quadfield::PrimeIdeal;
using quadfield::QuadElement;
using quadfield::SplitType;

uint64_t to_u64_prime(const Int& q) {
    if (!q.fits_ulong_p())
        throw arith::OutOfCertifiedRange(
            "prime factor exceeds machine range");
    return q.get_ui();
}

// ---- the norm-filtered exponent space, organized block by block ----

// Exponents of a conjugate pair of split primes are coupled (through the
// norm condition and the valuation tests); every other prime stands alone.
struct Block {
    size_t i1;
    ptrdiff_t i2; // conjugate's index in S, or -1
    std::vector<std::array<uint32_t, 2>> entries;
};

struct Plan {
    std::vector<QuadElement> basis;  // Selmer generators, aligned with S
    std::vector<uint32_t> orders;    // class order per S entry
    std::vector<Block> blocks;
    bool infeasible = false; // norm condition unsatisfiable -> E empty
};

std::optional<Plan> make_plan(const DescentData& d) {
    auto basis = quadfield::selmer_set(d.field, d.S, d.p);
    if (!basis)
        return std::nullopt;
    Plan plan;
    plan.basis = std::move(*basis);
    uint64_t p = d.p;

    std::map<uint64_t, unsigned> vu;
    for (const auto& [q, e] : arith::factorize(d.u))
        vu[to_u64_prime(q)] = e;

    plan.orders.reserve(d.S.size());
    for (const auto& P : d.S)
        plan.orders.push_back(quadfield::class_order(d.field, P));

    std::vector<bool> used(d.S.size(), false);
    for (size_t i = 0; i < d.S.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        const PrimeIdeal& P = d.S[i];
        uint64_t h = plan.orders[i] % p;
        uint64_t hinv = arith::invmod(h, p);
        auto it = vu.find(P.q);
        uint64_t t = (it == vu.end()) ? 0 : it->second % p;

        Block blk;
        blk.i1 = i;
        blk.i2 = -1;
        if (P.type == SplitType::Split) {
            for (size_t j = i + 1; j < d.S.size(); ++j) {
                if (!used[j] && d.S[j].q == P.q &&
                    d.S[j].type == SplitType::Split &&
                    d.S[j].root == P.q - P.root) {
                    blk.i2 = static_cast<ptrdiff_t>(j);
                    used[j] = true;
                    break;
                }
            }
        }
        if (blk.i2 >= 0) {
            uint64_t s = arith::mulmod(t, hinv, p);
            for (uint32_t e1 = 0; e1 < p; ++e1)
                blk.entries.push_back(
                    {e1, static_cast<uint32_t>((s + p - e1 % p) % p)});
        } else {
            uint64_t denom =
                (P.type == SplitType::Inert) ? (2 * h) % p : h;
            uint64_t e = arith::mulmod(t, arith::invmod(denom, p), p);
            blk.entries.push_back({static_cast<uint32_t>(e), 0});
        }
        plan.blocks.push_back(std::move(blk));
    }

    // a prime of u with no member of S above it makes the norm filter
    // unsatisfiable (cannot happen for data built by descent_data)
    for (const auto& [q, e] : vu) {
        if (e % p == 0)
            continue;
        bool covered = false;
        for (const auto& P : d.S)
            covered = covered || P.q == q;
        if (!covered)
            plan.infeasible = true;
    }
    return plan;
}

uint64_t plan_size(const Plan& plan) {
    uint64_t total = 1;
    for (const auto& blk : plan.blocks) {
        if (blk.entries.empty())
            return 0;
        unsigned __int128 t =
            static_cast<unsigned __int128>(total) * blk.entries.size();
        if (t > (static_cast<unsigned __int128>(1) << 62))
            return UINT64_MAX;
        total = static_cast<uint64_t>(t);
    }
    return total;
}

// Calls fn(exps) for every tuple in the block product; fn returns false to
// stop.  Returns true when the whole space was visited.
template <typename Fn>
bool for_each_exponents(const Plan& plan, size_t s_size, Fn&& fn) {
    std::vector<size_t> pos(plan.blocks.size(), 0);
    std::vector<uint32_t> exps(s_size, 0);
    for (;;) {
        for (size_t b = 0; b < plan.blocks.size(); ++b) {
            const Block& blk = plan.blocks[b];
            const auto& ent = blk.entries[pos[b]];
            exps[blk.i1] = ent[0];
            if (blk.i2 >= 0)
                exps[static_cast<size_t>(blk.i2)] = ent[1];
        }
        if (!fn(exps))
            return false;
        size_t b = 0;
        while (b < plan.blocks.size() &&
               ++pos[b] == plan.blocks[b].entries.size()) {
            pos[b] = 0;
            ++b;
        }
        if (b == plan.blocks.size())
            return true;
    }
}

EpsilonCandidate build_candidate(const DescentData& d, const Plan& plan,
                                 const std::vector<uint32_t>& exps) {
    QuadElement value = quadfield::qe_one();
    for (size_t i = 0; i < exps.size(); ++i)
        if (exps[i] != 0)
            value = quadfield::mul(
                d.field, value,
                quadfield::pow(d.field, plan.basis[i], exps[i]));
    EpsilonCandidate c;
    c.exps = exps;
    c.conjugate = quadfield::conj(value);
    c.value = std::move(value);
    return c;
}

// ---- valuation arguments ----

struct QConsts {
    int64_t ov, onm, o2;
};

QConsts ord_constants(const DescentData& d, const PrimeIdeal& P) {
    QuadElement ev = quadfield::qe_int(d.v);
    QuadElement enm{0, d.n, 1};
    QuadElement e2 = quadfield::qe_int(2);
    return {quadfield::ord_at(d.field, ev, P),
            quadfield::ord_at(d.field, enm, P),
            quadfield::ord_at(d.field, e2, P)};
}

bool pairwise_distinct_mod(int64_t a, int64_t b, int64_t c, uint32_t p) {
    auto red = [&](int64_t x) {
        int64_t r = x % static_cast<int64_t>(p);
        return r < 0 ? r + p : r;
    };
    int64_t x = red(a), y = red(b), z = red(c);
    return x != y && x != z && y != z;
}

bool valuation_fires(const QConsts& qc, int64_t oe, int64_t oec,
                     uint32_t p) {
    return pairwise_distinct_mod(qc.ov, qc.onm, oe, p) ||
           pairwise_distinct_mod(qc.o2 + qc.ov, oe, oec, p) ||
           pairwise_distinct_mod(qc.o2 + qc.onm, oe, oec, p);
}

// Exact feasibility of the valuation system at one prime P.  A solution
// gives X = ord(eps * eta^p), Y the same for the conjugate, T = ord(v s^p),
// tied together by the three identities
//     eps eta^p = v s^p + n sqrt(-m),
//     (eps eta^p) + conj = 2 v s^p,      (eps eta^p) - conj = 2 n sqrt(-m),
// whose right-hand ords are ov + p Z (>= ov), exact o2 + T, exact o2 + onm.
// X ranges over { x >= 0 : x == oe (mod p) } and Y likewise; infeasibility
// of the whole system rules the candidate out.  This is the ideal-level
// coprimality refinement of the congruence test above: gcd(xi, conj xi)
// divides both 2 v s^p and 2 n sqrt(-m), which pins the exponent splits the
// congruence conditions alone cannot separate.
bool ord_system_feasible(const QConsts& qc, int64_t oe, int64_t oec,
                         uint32_t p) {
    int64_t pp = p;
    auto cong = [&](int64_t a, int64_t b) { return (a - b) % pp == 0; };
    auto clsmin = [&](int64_t a) { return ((a % pp) + pp) % pp; };
    int64_t re = clsmin(oe), rec = clsmin(oec);
    // T < onm forces X = Y = T
    if (cong(oe, qc.ov) && cong(oec, qc.ov) &&
        std::max({qc.ov, re, rec}) < qc.onm)
        return true;
    // T > onm forces X = Y = onm
    if (cong(oe, qc.onm) && cong(oec, qc.onm) && re <= qc.onm &&
        rec <= qc.onm)
        return true;
    // T = onm leaves X, Y >= onm with min(X, Y) capped by o2 + onm
    if (cong(qc.ov, qc.onm) && qc.ov <= qc.onm) {
        if (cong(oe, oec)) {
            int64_t lo = std::max(qc.onm, re);
            int64_t x = re + (lo - re + pp - 1) / pp * pp;
            if (x <= qc.o2 + qc.onm)
                return true;
        }
        if (cong(oe, qc.o2 + qc.onm) && re <= qc.o2 + qc.onm)
            return true;
        if (cong(oec, qc.o2 + qc.onm) && rec <= qc.o2 + qc.onm)
            return true;
    }
    return false;
}

// ---- chi witnesses ----

struct ChiWitness {
    uint64_t q = 0;
    uint64_t k = 0;
    PrimeIdeal P1, P2;
    std::vector<uint64_t> zetas; // p-th powers of F_q
};

// Witness geometry depends only on (m, p, k); share it across equations.
std::optional<ChiWitness> chi_witness(const quadfield::ImagQuadField& field,
                                      uint32_t p, uint64_t k) {
    struct Key {
        uint32_t m, p;
        uint64_t k;
        bool operator<(const Key& o) const {
            return std::tie(m, p, k) < std::tie(o.m, o.p, o.k);
        }
    };
    static std::map<Key, std::optional<ChiWitness>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    Key key{field.m, p, k};
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;

    std::optional<ChiWitness> w;
    uint64_t q = 2 * k * p + 1;
    if (arith::is_prime(q) &&
        quadfield::split_type(field, q) == SplitType::Split) {
        auto above = quadfield::primes_above(field, q);
        w = ChiWitness{q, k, above[0], above[1],
                       sieve::unity_roots_with_zero(q, 2 * k)};
    }
    cache.emplace(key, w);
    return w;
}

bool chi_eliminates(const DescentData& d, const ChiWitness& w,
                    const EpsilonCandidate& cand) {
    uint64_t q = w.q, p = d.p;
    uint64_t e1 = quadfield::residue(d.field, cand.value, w.P1);
    uint64_t e2 = quadfield::residue(d.field, cand.value, w.P2);
    if (e1 == 0 || e2 == 0)
        return false; // unusable for this candidate
    uint64_t inv1 = arith::invmod(e1, q), inv2 = arith::invmod(e2, q);
    uint64_t vq = mpz_fdiv_ui(d.v.get_mpz_t(), q);
    uint64_t nq = mpz_fdiv_ui(d.n.get_mpz_t(), q);
    uint64_t nr1 = arith::mulmod(nq, w.P1.root, q);
    uint64_t nr2 = arith::mulmod(nq, w.P2.root, q);
    for (uint64_t zeta : w.zetas) {
        uint64_t x1 = (arith::mulmod(vq, zeta, q) + nr1) % q;
        x1 = arith::mulmod(x1, inv1, q);
        if (x1 != 0 && arith::powmod(x1, 2 * w.k, q) != 1)
            continue;
        uint64_t x2 = (arith::mulmod(vq, zeta, q) + nr2) % q;
        x2 = arith::mulmod(x2, inv2, q);
        if (x2 != 0 && arith::powmod(x2, 2 * w.k, q) != 1)
            continue;
        return false; // zeta is compatible at both primes
    }
    return true;
}

bool witness_meets_support(const DescentData& d, uint64_t q) {
    return mpz_fdiv_ui(d.u.get_mpz_t(), q) == 0 ||
           mpz_fdiv_ui(d.n.get_mpz_t(), q) == 0 || d.m % q == 0;
}

} // namespace

DescentData descent_data(const Int& A, const Int& B, const Int& C,
                         uint32_t p) {
    if (A < 1 || B < 1 || C < 1)
        throw std::invalid_argument("coefficients must be positive");
    DescentData d;
    d.A = A;
    d.B = B;
    d.C = C;
    d.p = p;
    d.Bprime = 1;
    for (const auto& [q, e] : arith::factorize(B))
        if (e % 2 == 1)
            d.Bprime *= q;
    Int bb = B * d.Bprime;
    d.v = sqrt(bb);
    assert(d.v * d.v == bb);
    d.u = A * d.Bprime;
    auto [msf, nn] = arith::squarefree_decompose(C * d.Bprime);
    d.n = nn;
    if (!msf.fits_ulong_p() || msf.get_ui() > 0xffffffffULL)
        throw arith::OutOfCertifiedRange(
            "squarefree part too large for field construction");
    d.m = static_cast<uint32_t>(msf.get_ui());
    d.field = quadfield::make_field(d.m);

    std::set<uint64_t> rats = {2};
    for (const Int* x : {&d.u, &d.n}) {
        for (const auto& [q, e] : arith::factorize(*x)) {
            (void)e;
            rats.insert(to_u64_prime(q));
        }
    }
    for (const auto& [q, e] : arith::factorize(static_cast<uint64_t>(d.m))) {
        (void)e;
        rats.insert(q);
    }
    for (uint64_t q : rats)
        for (const auto& P : quadfield::primes_above(d.field, q))
            d.S.push_back(P);
    return d;
}

std::optional<std::vector<EpsilonCandidate>>
epsilon_candidates(const DescentData& d, uint64_t guard) {
    auto plan = make_plan(d);
    if (!plan)
        return std::nullopt;
    if (plan->infeasible)
        return std::vector<EpsilonCandidate>{};
    if (plan_size(*plan) > guard)
        return std::nullopt;
    std::vector<EpsilonCandidate> out;
    for_each_exponents(*plan, d.S.size(),
                       [&](const std::vector<uint32_t>& exps) {
                           out.push_back(build_candidate(d, *plan, exps));
                           return true;
                       });
    return out;
}

bool eliminate_by_valuation(const DescentData& d,
                            const EpsilonCandidate& e) {
    // candidate primes: everything above rational primes of 2*u*v*m*n
    // (ords of v, n*sqrt(-m), ε all vanish elsewhere)
    std::set<uint64_t> rats = {2};
    for (const Int* x : {&d.u, &d.v, &d.n}) {
        for (const auto& [q, ex] : arith::factorize(*x)) {
            (void)ex;
            rats.insert(to_u64_prime(q));
        }
    }
    for (const auto& [q, ex] :
         arith::factorize(static_cast<uint64_t>(d.m))) {
        (void)ex;
        rats.insert(q);
    }
    for (uint64_t q : rats) {
        for (const auto& P : quadfield::primes_above(d.field, q)) {
            QConsts qc = ord_constants(d, P);
            int64_t oe = quadfield::ord_at(d.field, e.value, P);
            int64_t oec = quadfield::ord_at(d.field, e.conjugate, P);
            if (valuation_fires(qc, oe, oec, d.p))
                return true;
        }
    }
    return false;
}

ChiVerdict eliminate_by_chi(const DescentData& d, const EpsilonCandidate& e,
                            uint64_t k) {
    uint64_t q = 2 * k * d.p + 1;
    if (witness_meets_support(d, q))
        return ChiVerdict::SkipWitness;
    auto w = chi_witness(d.field, d.p, k);
    if (!w)
        return ChiVerdict::SkipWitness;
    uint64_t e1 = quadfield::residue(d.field, e.value, w->P1);
    uint64_t e2 = quadfield::residue(d.field, e.value, w->P2);
    if (e1 == 0 || e2 == 0)
        return ChiVerdict::SkipWitness;
    return chi_eliminates(d, *w, e) ? ChiVerdict::Eliminated
                                    : ChiVerdict::Undecided;
}

DescentOutcome descent_sieve(const DescentData& d, uint32_t chi_k_max,
                             uint64_t guard) {
    auto plan = make_plan(d);
    if (!plan)
        return {false, false, 0, "p-Selmer basis unavailable"};
    if (plan->infeasible)
        return {true, true, 0, "norm condition unsatisfiable"};

    std::vector<QConsts> consts;
    consts.reserve(d.S.size());
    for (const auto& P : d.S)
        consts.push_back(ord_constants(d, P));

    for (auto& blk : plan->blocks) {
        int64_t h = plan->orders[blk.i1];
        auto dead = [&](const std::array<uint32_t, 2>& ent) {
            // conjugation swaps the pair's ords and fixes the constants,
            // so the system at the conjugate prime is the mirror image
            int64_t oe = h * ent[0];
            int64_t oec = blk.i2 >= 0 ? h * ent[1] : oe;
            return !ord_system_feasible(consts[blk.i1], oe, oec, d.p);
        };
        blk.entries.erase(
            std::remove_if(blk.entries.begin(), blk.entries.end(), dead),
            blk.entries.end());
        if (blk.entries.empty())
            return {true, true, 0, "valuation lemma"};
    }

    uint64_t total = plan_size(*plan);
    if (total > guard)
        return {false, false, total, "candidate enumeration guard"};

    std::vector<EpsilonCandidate> alive;
    for_each_exponents(*plan, d.S.size(),
                       [&](const std::vector<uint32_t>& exps) {
                           alive.push_back(build_candidate(d, *plan, exps));
                           return true;
                       });

    for (uint64_t k = 1; k <= chi_k_max && !alive.empty(); ++k) {
        uint64_t q = 2 * k * d.p + 1;
        if (witness_meets_support(d, q))
            continue;
        auto w = chi_witness(d.field, d.p, k);
        if (!w)
            continue;
        alive.erase(std::remove_if(alive.begin(), alive.end(),
                                   [&](const EpsilonCandidate& c) {
                                       return chi_eliminates(d, *w, c);
                                   }),
                    alive.end());
    }
    if (alive.empty())
        return {true, true, total, ""};
    std::string note = "surviving exponents:";
    for (uint32_t e : alive.front().exps)
        note += " " + std::to_string(e);
    return {false, true, total, note};
}

SieveOutcome descent_sieve(const localsolve::ReducedEquation& red,
                           uint32_t k_max, uint64_t guard) {
    try {
        DescentData d = descent_data(red.A, red.B, red.C, red.p);
        DescentOutcome out = descent_sieve(d, k_max, guard);
        if (out.eliminated && out.exhausted)
            return SieveOutcome::killed(0);
        return SieveOutcome::survives();
    } catch (const arith::OutOfCertifiedRange&) {
        return SieveOutcome::survives();
    }
}

} // namespace descent
} // namespace cubesum
