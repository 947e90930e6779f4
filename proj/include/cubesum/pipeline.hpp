#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubesum/casesplit.hpp"

namespace cubesum {
namespace pipeline {

// Stages in elimination order; every equation (case, r, p) terminates at
// exactly one of them.
enum class StageId {
    CaseBuild,
    TrustedRules,
    PrimarySieve,
    LocalSolubility,
    Descent,
    ThueExport,
};

// Stable kebab-case name, and its inverse (throws std::invalid_argument).
const char* stage_name(StageId s);
StageId stage_from_name(const std::string& name);

struct Config {
    uint32_t r_min = 1;
    uint32_t r_max = 1'000'000;
    std::vector<Case> cases = {Case::C1, Case::C2, Case::C3, Case::C4};
    uint32_t k_max = 400; // witness depth, shared by sieve and descent
    uint32_t jobs = 1;
    bool audit = false; // disable trusted rules, run every chain
    uint32_t p_cap = 0; // extra cap on p (0: just the proven bounds)
    bool progress = false;
    std::string out_dir; // empty: keep everything in memory
};

struct ConfigMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Digest of the work-defining fields (r range, cases, k_max, audit, p_cap).
// jobs, progress and out_dir do not affect results and stay out of it.
std::string config_digest(const Config& cfg);

// Equation that outlived the descent stage: exported as a Thue problem
// unless a trusted rule closes it at the export boundary.
struct SurvivorRecord {
    uint32_t r;
    Case label;
    uint32_t p;
    std::string a, b, c; // reduced coefficients, decimal
    StageId terminal;    // ThueExport or TrustedRules
    std::string witness; // Thue problem id, or the rule id
    std::string timestamp;
};

struct StageCounts {
    uint64_t after_sieve = 0;
    uint64_t after_local = 0;
    uint64_t after_descent = 0;
};

struct Report {
    Config config;
    std::string digest;
    // (case, p) -> counts, for every (case, p) whose sieve chain ran.
    std::map<std::pair<int, uint32_t>, StageCounts> rows;
    std::map<int, uint32_t> p_cap;         // case -> exponent cap applied
    std::vector<SurvivorRecord> survivors; // sorted by (case, p, r)
    std::vector<std::string> notes;        // trusted-rule closures
};

// Runs every admissible equation of the configured cases and r range
// through the staged chain, one work unit per (case, p) with r varying
// inside.  Exponents run over primes 5 <= p < cap.  Routing: p = 5 sends
// cases 1-3 to the rational-point fixture and case 4 to the chain; p >= 7
// closes cases 1-2 by the even-x rule and runs the chain for cases 3-4;
// surviving case-3 equations with r = 2^k are closed at the export
// boundary.  Audit mode disables all three rules.
//
// With out_dir set, the run checkpoints: parts/case{N}_p{P}.jsonl per
// finished unit (written atomically), state.json with the config digest,
// and on completion survivors.jsonl, thue_problems.jsonl, config.json and
// report_case{N}.csv.  Re-running over the same directory resumes from the
// finished parts; a digest mismatch raises ConfigMismatch.  Outputs are
// deterministic for a fixed config, up to timestamps.
Report run_range(const Config& cfg);

// "csv" or "markdown": one row per prime up to the last nonzero count, a
// collapsed row for the all-zero tail, then a total row.  Byte-stable.
std::string render_table(const Report& rep, Case c,
                         const std::string& format);

} // namespace pipeline
} // namespace cubesum
