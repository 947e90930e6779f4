#include <doctest.h>

#include <sstream>

#include "cubesum/thue.hpp"

using namespace cubesum;
using namespace cubesum::thue;

namespace {

ThueProblem sample_problem(Case label, uint32_t r, uint32_t p) {
    auto eq = casesplit::build_case_equation(label, r, p);
    auto out = localsolve::reduce_to_coprime(eq);
    REQUIRE(out.red);
    return to_thue(*out.red, label, r);
}

} // namespace

TEST_CASE("degree-p form carries the reduced coefficients") {
    auto prob = sample_problem(Case::C4, 1, 5);
    CHECK(prob.a == 81);
    CHECK(prob.b == 1);
    CHECK(prob.c == 2);
    CHECK(prob.p == 5);
    CHECK(prob.id == "thue-c4-p5-r1");
    CHECK(prob.from.label == Case::C4);
    CHECK(prob.from.r == 1);

    auto p3 = sample_problem(Case::C3, 7, 7);
    CHECK(p3.a == 1);
    CHECK(p3.b == arith::pow_int(Int(3), 12));
    CHECK(p3.c == 2 * 49);
    CHECK(p3.id == "thue-c3-p7-r7");
}

TEST_CASE("bounded search finds planted solutions") {
    // sigma^5 - tau^5 = 2^5 - 1 has (2, 1)
    ThueProblem prob{"planted", Int(1), Int(1), Int(31), 5,
                     {Case::C4, 1}};
    auto sols = bounded_search(prob, Int(10));
    bool found = false;
    for (const auto& [s, t] : sols)
        found = found || (s == 2 && t == 1);
    CHECK(found);
    // every reported pair must satisfy the form
    for (const auto& [s, t] : sols)
        CHECK(arith::pow_int(s, 5) - arith::pow_int(t, 5) == 31);

    // negative coordinates are inside the box too: sigma^5 - 2 tau^5 = 3
    // at (sigma, tau) = (-1, -1) ... -1 + 2 = 1, no; use 9*s^5 - t^5 = 8
    // with (1, 1) and (-1, -17)? keep it simple: s^5 - t^5 = 0 is excluded
    // by c >= 1, so check a signed pair on s^5 - 2 t^5 = 1 at (-1, -1)
    ThueProblem signed_prob{"signed", Int(1), Int(2), Int(1), 5,
                            {Case::C4, 1}};
    auto ssols = bounded_search(signed_prob, Int(3));
    bool has_neg = false, has_pos = false;
    for (const auto& [s, t] : ssols) {
        CHECK(arith::pow_int(s, 5) - 2 * arith::pow_int(t, 5) == 1);
        if (s == -1 && t == -1)
            has_neg = true;
        if (s == 1 && t == 0)
            has_pos = true;
    }
    CHECK(has_neg);
    CHECK(has_pos);

    // the planted case-3 point: 9*sigma^5 - tau^5 = 8 at (sigma, tau) = (1, 1)
    auto red = localsolve::reduce_to_coprime(Int(1), arith::pow_int(Int(3), 8),
                                             Int(52488), 5);
    REQUIRE(red.red);
    auto planted = to_thue(*red.red, Case::C3, 162);
    CHECK(planted.a == 9);
    CHECK(planted.b == 1);
    CHECK(planted.c == 8);
    auto psols = bounded_search(planted, Int(100));
    bool hit = false;
    for (const auto& [s, t] : psols)
        hit = hit || (s == 1 && t == 1);
    CHECK(hit);
}

TEST_CASE("pullback of search hits") {
    // tau = 1 = 1^2 pulls back; for the planted case-3 problem the lift is
    // the gcd-violating triple, so the rejection must say GcdViolation
    auto red = localsolve::reduce_to_coprime(Int(1), arith::pow_int(Int(3), 8),
                                             Int(52488), 5);
    REQUIRE(red.red);
    auto planted = to_thue(*red.red, Case::C3, 162);
    auto res = pullback(planted, Int(1), Int(1));
    REQUIRE(std::holds_alternative<PullbackReject>(res));
    CHECK(std::get<PullbackReject>(res) == PullbackReject::GcdViolation);

    // tau = 2 is not a square
    auto res2 = pullback(planted, Int(1), Int(2));
    REQUIRE(std::holds_alternative<PullbackReject>(res2));
    CHECK(std::get<PullbackReject>(res2) == PullbackReject::NotASquare);

    // negative tau can never be a square
    auto res3 = pullback(planted, Int(-1), Int(-1));
    REQUIRE(std::holds_alternative<PullbackReject>(res3));
    CHECK(std::get<PullbackReject>(res3) == PullbackReject::NotASquare);

    // a genuine lift (only possible off the prime range, at exponent 3):
    // case 4 at r = 2 gives 9*s^3 - t^3 = 8, and (1, 1) lifts through
    // tau = 1 = 1^2 to the cube triple (-1)^3 + 1^3 + 3^3 = 27 = 3^3
    auto eq = casesplit::build_case_equation(Case::C4, 2, 3);
    auto out = localsolve::reduce_to_coprime(eq);
    REQUIRE(out.red);
    auto prob = to_thue(*out.red, Case::C4, 2);
    CHECK(prob.a == 9);
    CHECK(prob.b == 1);
    CHECK(prob.c == 8);
    auto res4 = pullback(prob, Int(1), Int(1));
    REQUIRE(std::holds_alternative<casesplit::SolutionCandidate>(res4));
    const auto& cand = std::get<casesplit::SolutionCandidate>(res4);
    CHECK(cand.x == 1);
    CHECK(cand.y == 3);
    // ... and the cube identity really holds
    Int lhs = arith::pow_int(cand.x - 2, 3) + arith::pow_int(cand.x, 3) +
              arith::pow_int(cand.x + 2, 3);
    CHECK(lhs == arith::pow_int(cand.y, 3));
}

TEST_CASE("export and import round-trip") {
    std::vector<ThueProblem> probs = {
        sample_problem(Case::C4, 1, 5),
        sample_problem(Case::C3, 7, 7),
        sample_problem(Case::C4, 25, 11),
    };
    std::stringstream ss;
    export_problems(probs, ss);
    auto back = import_problems(ss);
    REQUIRE(back.size() == probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        CHECK(back[i].id == probs[i].id);
        CHECK(back[i].a == probs[i].a);
        CHECK(back[i].b == probs[i].b);
        CHECK(back[i].c == probs[i].c);
        CHECK(back[i].p == probs[i].p);
        CHECK(back[i].from.label == probs[i].from.label);
        CHECK(back[i].from.r == probs[i].from.r);
    }
}

TEST_CASE("malformed problem files are rejected") {
    auto expect_schema_error = [](const std::string& line) {
        std::stringstream ss(line);
        CHECK_THROWS_AS((void)import_problems(ss), SchemaError);
    };
    expect_schema_error("not json at all");
    expect_schema_error("{\"id\":\"x\"}"); // missing fields
    expect_schema_error(
        "{\"id\":\"x\",\"a\":\"1\",\"b\":\"1\",\"c\":\"1\",\"p\":5,"
        "\"provenance\":{\"case\":9,\"r\":1}}"); // case out of range
    expect_schema_error(
        "{\"id\":\"x\",\"a\":1,\"b\":\"1\",\"c\":\"1\",\"p\":5,"
        "\"provenance\":{\"case\":4,\"r\":1}}"); // a must be a string
    expect_schema_error(
        "{\"id\":\"x\",\"a\":\"\",\"b\":\"1\",\"c\":\"1\",\"p\":5,"
        "\"provenance\":{\"case\":4,\"r\":1}}"); // empty number
}

TEST_CASE("result ingestion verifies claims") {
    std::vector<ThueProblem> probs = {sample_problem(Case::C4, 1, 5)};
    const std::string id = probs[0].id; // thue-c4-p5-r1

    SUBCASE("no-solutions passes through with its certificate") {
        std::stringstream ss;
        ss << "{\"id\":\"" << id << "\",\"status\":\"no-solutions\","
           << "\"solver\":\"pari-thue-2.15\",\"certificate-note\":"
           << "\"unconditional\"}\n";
        auto res = ingest_results(probs, ss);
        REQUIRE(res.size() == 1);
        CHECK(res[0].no_solutions);
        CHECK(res[0].solver == "pari-thue-2.15");
        CHECK(res[0].certificate_note == "unconditional");
        CHECK(res[0].solutions.empty());
    }

    SUBCASE("claimed solutions are substituted into the form") {
        // 81*3^5 - 1^10 ... the real identity is 81*s^5 - t^5 = 2 at no
        // small point; fabricate a correct equality for this problem:
        // 81*1^5 - 79 = 2, but 79 is not a 5th power -- instead verify the
        // error path and a genuinely valid pair on a synthetic problem
        std::vector<ThueProblem> synth = {
            {"synthetic-1", Int(1), Int(1), Int(31), 5, {Case::C4, 1}}};
        std::stringstream good;
        good << "{\"id\":\"synthetic-1\",\"status\":\"solutions\","
             << "\"solutions\":[[\"2\",\"1\"]],\"solver\":\"x\","
             << "\"certificate-note\":\"-\"}\n";
        auto res = ingest_results(synth, good);
        REQUIRE(res.size() == 1);
        CHECK(!res[0].no_solutions);
        REQUIRE(res[0].solutions.size() == 1);
        CHECK(res[0].solutions[0].first == 2);
        CHECK(res[0].solutions[0].second == 1);

        std::stringstream bad;
        bad << "{\"id\":\"synthetic-1\",\"status\":\"solutions\","
            << "\"solutions\":[[\"2\",\"2\"]],\"solver\":\"x\","
            << "\"certificate-note\":\"-\"}\n";
        CHECK_THROWS_AS((void)ingest_results(synth, bad), VerificationError);
    }

    SUBCASE("unknown ids and malformed rows are schema errors") {
        std::stringstream unknown;
        unknown << "{\"id\":\"no-such-problem\",\"status\":\"no-solutions\","
                << "\"solver\":\"x\",\"certificate-note\":\"-\"}\n";
        CHECK_THROWS_AS((void)ingest_results(probs, unknown), SchemaError);

        std::stringstream badstatus;
        badstatus << "{\"id\":\"" << id << "\",\"status\":\"maybe\","
                  << "\"solver\":\"x\",\"certificate-note\":\"-\"}\n";
        CHECK_THROWS_AS((void)ingest_results(probs, badstatus), SchemaError);

        std::stringstream nosolver;
        nosolver << "{\"id\":\"" << id << "\",\"status\":\"no-solutions\","
                 << "\"certificate-note\":\"-\"}\n";
        CHECK_THROWS_AS((void)ingest_results(probs, nosolver), SchemaError);

        std::stringstream contradict;
        contradict << "{\"id\":\"" << id << "\",\"status\":\"no-solutions\","
                   << "\"solutions\":[[\"1\",\"1\"]],"
                   << "\"solver\":\"x\",\"certificate-note\":\"-\"}\n";
        CHECK_THROWS_AS((void)ingest_results(probs, contradict), SchemaError);
    }
}
