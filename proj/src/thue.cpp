#include "cubesum/thue.hpp"

#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

namespace cubesum {
namespace thue {

namespace {

using nlohmann::json;

Int signed_pow(const Int& base, unsigned long e) {
    Int out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

// Exact p-th root over Z for odd p (negative radicands allowed).
std::optional<Int> odd_root(const Int& n, uint32_t p) {
    if (n >= 0)
        return arith::pth_root_exact(n, p);
    auto r = arith::pth_root_exact(-n, p);
    if (!r)
        return std::nullopt;
    return -*r;
}

PullbackReject map_reason(casesplit::RejectReason r) {
    switch (r) {
    case casesplit::RejectReason::IdentityMismatch:
        return PullbackReject::IdentityMismatch;
    case casesplit::RejectReason::Trivial:
        return PullbackReject::Trivial;
    case casesplit::RejectReason::GcdViolation:
    default:
        return PullbackReject::GcdViolation;
    }
}

Int int_of_string(const json& v, const char* field) {
    if (!v.is_string())
        throw SchemaError(std::string(field) + " must be a decimal string");
    try {
        return Int(v.get<std::string>());
    } catch (const std::invalid_argument&) {
        throw SchemaError(std::string(field) + " is not a valid integer");
    }
}

uint32_t u32_of(const json& v, const char* field) {
    if (!v.is_number_unsigned())
        throw SchemaError(std::string(field) +
                          " must be an unsigned integer");
    uint64_t x = v.get<uint64_t>();
    if (x > UINT32_MAX)
        throw SchemaError(std::string(field) + " out of range");
    return static_cast<uint32_t>(x);
}

json parse_line(const std::string& line, size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw SchemaError("line " + std::to_string(lineno) +
                          ": not a JSON object");
    return j;
}

// (G, H) with sigma_orig = G*sigma', rho_orig = H*rho'.  The problem only
// stores the reduced coefficients, so the reduction is re-derived from the
// provenance; when the coefficients did not come out of that reduction
// (already-coprime case triples, hand-built problems) the lift is direct.
std::pair<Int, Int> substitution_factors(const ThueProblem& prob) {
    Int G = 1, H = 1;
    if (prob.from.r == 0 || prob.p < 3)
        return {G, H};
    auto base = casesplit::build_case_equation(prob.from.label, 1, prob.p);
    Int rr = Int(prob.from.r) * prob.from.r;
    Int a0 = base.a, b0 = base.b, c0 = base.c * rr;
    if (a0 == prob.a && b0 == prob.b && c0 == prob.c)
        return {G, H};
    auto out = localsolve::reduce_to_coprime(a0, b0, c0, prob.p);
    if (!out.red || out.red->A != prob.a || out.red->B != prob.b ||
        out.red->C != prob.c)
        return {G, H};
    for (const auto& st : out.red->log) {
        if (st.which == '1')
            G *= st.factor;
        else if (st.which == '2')
            H *= st.factor;
    }
    return {G, H};
}

} // namespace

ThueProblem to_thue(const localsolve::ReducedEquation& red, Case label,
                    uint32_t r) {
    ThueProblem prob;
    prob.a = red.A;
    prob.b = red.B;
    prob.c = red.C;
    prob.p = red.p;
    prob.from = {label, r};
    prob.id = "thue-c" + std::to_string(static_cast<int>(label)) + "-p" +
              std::to_string(red.p) + "-r" + std::to_string(r);
    return prob;
}

std::vector<std::pair<Int, Int>> bounded_search(const ThueProblem& prob,
                                                const Int& H) {
    if (H < 0)
        throw std::invalid_argument("bounded_search: negative bound");
    std::vector<std::pair<Int, Int>> out;
    for (Int tau = -H; tau <= H; ++tau) {
        Int rhs = prob.c + prob.b * signed_pow(tau, prob.p);
        if (!mpz_divisible_p(rhs.get_mpz_t(), prob.a.get_mpz_t()))
            continue;
        auto sigma = odd_root(rhs / prob.a, prob.p);
        if (!sigma)
            continue;
        if (abs(*sigma) > H)
            continue;
        out.emplace_back(*sigma, tau);
    }
    return out;
}

PullbackResult pullback(const ThueProblem& prob, const Int& sigma,
                        const Int& tau) {
    if (tau < 0 || !mpz_perfect_square_p(tau.get_mpz_t()))
        return PullbackReject::NotASquare;
    auto [G, H] = substitution_factors(prob);
    Int w1 = G * sqrt(tau);
    Int y2 = H * sigma;
    auto first = casesplit::reconstruct_solution(prob.from.label,
                                                 prob.from.r, prob.p, w1,
                                                 y2);
    if (std::holds_alternative<casesplit::SolutionCandidate>(first))
        return std::get<casesplit::SolutionCandidate>(first);
    if (w1 != 0) {
        auto second = casesplit::reconstruct_solution(
            prob.from.label, prob.from.r, prob.p, -w1, y2);
        if (std::holds_alternative<casesplit::SolutionCandidate>(second))
            return std::get<casesplit::SolutionCandidate>(second);
    }
    return map_reason(std::get<casesplit::Rejected>(first).reason);
}

void export_problems(const std::vector<ThueProblem>& probs,
                     std::ostream& out) {
    for (const auto& pr : probs) {
        json j;
        j["id"] = pr.id;
        j["a"] = pr.a.get_str();
        j["b"] = pr.b.get_str();
        j["c"] = pr.c.get_str();
        j["p"] = pr.p;
        j["provenance"] = {{"case", static_cast<int>(pr.from.label)},
                           {"r", pr.from.r}};
        out << j.dump() << '\n';
    }
}

std::vector<ThueProblem> import_problems(std::istream& in) {
    std::vector<ThueProblem> probs;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = parse_line(line, lineno);
        for (const char* f : {"id", "a", "b", "c", "p", "provenance"})
            if (!j.contains(f))
                throw SchemaError("line " + std::to_string(lineno) +
                                  ": missing field " + f);
        ThueProblem pr;
        if (!j["id"].is_string())
            throw SchemaError("id must be a string");
        pr.id = j["id"].get<std::string>();
        pr.a = int_of_string(j["a"], "a");
        pr.b = int_of_string(j["b"], "b");
        pr.c = int_of_string(j["c"], "c");
        pr.p = u32_of(j["p"], "p");
        const json& prov = j["provenance"];
        if (!prov.is_object() || !prov.contains("case") ||
            !prov.contains("r"))
            throw SchemaError("provenance must hold case and r");
        uint32_t cs = u32_of(prov["case"], "provenance.case");
        if (cs < 1 || cs > 4)
            throw SchemaError("provenance.case out of range");
        pr.from.label = static_cast<Case>(cs);
        pr.from.r = u32_of(prov["r"], "provenance.r");
        probs.push_back(std::move(pr));
    }
    return probs;
}

std::vector<SolverResult>
ingest_results(const std::vector<ThueProblem>& probs, std::istream& in) {
    std::map<std::string, const ThueProblem*> by_id;
    for (const auto& pr : probs)
        by_id[pr.id] = &pr;

    std::vector<SolverResult> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = parse_line(line, lineno);
        for (const char* f : {"id", "status", "solver", "certificate-note"})
            if (!j.contains(f))
                throw SchemaError("line " + std::to_string(lineno) +
                                  ": missing field " + f);
        SolverResult res;
        if (!j["id"].is_string() || !j["status"].is_string() ||
            !j["solver"].is_string() || !j["certificate-note"].is_string())
            throw SchemaError("line " + std::to_string(lineno) +
                              ": wrong field type");
        res.id = j["id"].get<std::string>();
        auto it = by_id.find(res.id);
        if (it == by_id.end())
            throw SchemaError("result for unknown problem " + res.id);
        const ThueProblem& pr = *it->second;

        res.solver = j["solver"].get<std::string>();
        res.certificate_note = j["certificate-note"].get<std::string>();
        std::string status = j["status"].get<std::string>();
        if (status == "no-solutions") {
            res.no_solutions = true;
            if (j.contains("solutions") && !j["solutions"].empty())
                throw SchemaError(res.id +
                                  ": no-solutions with solution list");
        } else if (status == "solutions") {
            res.no_solutions = false;
            if (!j.contains("solutions") || !j["solutions"].is_array())
                throw SchemaError(res.id + ": missing solutions array");
            for (const json& pair : j["solutions"]) {
                if (!pair.is_array() || pair.size() != 2)
                    throw SchemaError(res.id + ": solution not a pair");
                Int sigma = int_of_string(pair[0], "sigma");
                Int tau = int_of_string(pair[1], "tau");
                Int lhs = pr.a * signed_pow(sigma, pr.p) -
                          pr.b * signed_pow(tau, pr.p);
                if (lhs != pr.c)
                    throw VerificationError(
                        res.id + ": claimed solution fails substitution");
                res.solutions.emplace_back(std::move(sigma),
                                           std::move(tau));
            }
        } else {
            throw SchemaError(res.id + ": unknown status " + status);
        }
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace thue
} // namespace cubesum
