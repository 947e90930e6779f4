#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cubesum/casesplit.hpp"
#include "cubesum/localsolve.hpp"

namespace cubesum {
namespace thue {

// Where a problem came from: which case equation at which r.
struct Provenance {
    Case label;
    uint32_t r;
};

// a*sigma^p - b*tau^p = c, the degree-p form obtained from a reduced
// equation A*rho^p - B*sigma^(2p) = C by writing tau for the square
// sigma^2.  Solutions with tau not a perfect square do not pull back.
struct ThueProblem {
    std::string id;
    Int a, b, c;
    uint32_t p;
    Provenance from;
};

ThueProblem to_thue(const localsolve::ReducedEquation& red, Case label,
                    uint32_t r);

// All integer solutions with |sigma|, |tau| <= H, by scanning tau and
// testing whether (c + b*tau^p) / a is a perfect p-th power.  A search,
// not a proof: finding nothing never shows the problem has no solutions.
std::vector<std::pair<Int, Int>> bounded_search(const ThueProblem& prob,
                                                const Int& H);

enum class PullbackReject {
    NotASquare, // tau is no perfect square, so sigma^2 = tau is impossible
    IdentityMismatch,
    Trivial,
    GcdViolation,
};

using PullbackResult =
    std::variant<casesplit::SolutionCandidate, PullbackReject>;

// Lift a Thue solution back to the cube-sum equation.  tau must be a
// perfect square, and when the problem's coefficients came out of the
// coprime reduction, the solution is first carried back through the
// recorded substitutions (rho -> H*rho', sigma -> G*sigma').  Then
// (y1, y2) = (G*w1, H*sigma) goes through the case reconstruction, both
// signs of w1 tried.
PullbackResult pullback(const ThueProblem& prob, const Int& sigma,
                        const Int& tau);

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One JSON object per line:
//   {"id":..., "a":..., "b":..., "c":..., "p":...,
//    "provenance":{"case":..., "r":...}}
// with a, b, c as decimal strings.  import_problems inverts
// export_problems exactly and throws SchemaError on malformed input.
void export_problems(const std::vector<ThueProblem>& probs,
                     std::ostream& out);
std::vector<ThueProblem> import_problems(std::istream& in);

// External solver's answer for one problem.  status is either
// "no-solutions" (with the certificate note retained) or "solutions" with
// the list of (sigma, tau) pairs.
struct SolverResult {
    std::string id;
    bool no_solutions;
    std::vector<std::pair<Int, Int>> solutions;
    std::string solver;
    std::string certificate_note;
};

// One JSON object per line:
//   {"id":..., "status":"no-solutions"|"solutions", ["solutions":[[s,t],...],]
//    "solver":..., "certificate-note":...}
// Every id must match a problem; every claimed solution is substituted
// into its form before being accepted (VerificationError otherwise).
std::vector<SolverResult>
ingest_results(const std::vector<ThueProblem>& probs, std::istream& in);

} // namespace thue
} // namespace cubesum
