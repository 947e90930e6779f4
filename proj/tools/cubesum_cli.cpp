#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "cubesum/pipeline.hpp"
#include "cubesum/thue.hpp"

namespace {

using namespace cubesum;

const char* reject_name(thue::PullbackReject r) {
    switch (r) {
    case thue::PullbackReject::NotASquare:
        return "tau is not a perfect square";
    case thue::PullbackReject::IdentityMismatch:
        return "identity mismatch";
    case thue::PullbackReject::Trivial:
        return "trivial (x*y = 0)";
    case thue::PullbackReject::GcdViolation:
        return "gcd(x, r) > 1";
    }
    return "unknown";
}

int cmd_run(pipeline::Config cfg, const std::vector<int>& case_ints,
            const std::string& table_fmt, const std::string& resume_state) {
    if (!resume_state.empty()) {
        std::filesystem::path st(resume_state);
        if (!std::filesystem::exists(st)) {
            std::cerr << "error: resume state " << resume_state
                      << " does not exist\n";
            return 2;
        }
        std::string dir = st.parent_path().string();
        if (cfg.out_dir.empty())
            cfg.out_dir = dir;
        else if (std::filesystem::weakly_canonical(cfg.out_dir) !=
                 std::filesystem::weakly_canonical(dir)) {
            std::cerr << "error: --resume points outside --out\n";
            return 2;
        }
    }
    cfg.cases.clear();
    for (int c : case_ints) {
        if (c < 1 || c > 4) {
            std::cerr << "error: case " << c << " out of range\n";
            return 2;
        }
        cfg.cases.push_back(static_cast<Case>(c));
    }

    pipeline::Report rep = pipeline::run_range(cfg);

    for (Case c : rep.config.cases) {
        std::cout << "case " << static_cast<int>(c) << "\n"
                  << pipeline::render_table(rep, c, table_fmt) << "\n";
    }
    for (const auto& n : rep.notes)
        std::cout << "note: " << n << "\n";

    size_t exported = 0, rule_closed = 0;
    for (const auto& s : rep.survivors) {
        if (s.terminal == pipeline::StageId::ThueExport)
            ++exported;
        else
            ++rule_closed;
    }
    std::cout << rep.survivors.size() << " equations survived the descent ("
              << exported << " exported, " << rule_closed
              << " closed by trusted rules)\n";
    return 0;
}

int cmd_search(const std::string& problems_path, long long bound) {
    std::ifstream in(problems_path);
    if (!in) {
        std::cerr << "error: cannot open " << problems_path << "\n";
        return 2;
    }
    auto probs = thue::import_problems(in);
    bool nontrivial = false;
    for (const auto& pr : probs) {
        auto sols = thue::bounded_search(pr, Int(static_cast<long>(bound)));
        if (sols.empty()) {
            std::cout << pr.id << ": no solutions with |sigma|,|tau| <= "
                      << bound << "\n";
            continue;
        }
        for (const auto& [sigma, tau] : sols) {
            auto res = thue::pullback(pr, sigma, tau);
            if (std::holds_alternative<casesplit::SolutionCandidate>(res)) {
                const auto& sol =
                    std::get<casesplit::SolutionCandidate>(res);
                nontrivial = true;
                std::cout << pr.id << ": sigma=" << sigma
                          << " tau=" << tau << " lifts to x=" << sol.x
                          << " y=" << sol.y << " r=" << sol.r
                          << "  ** nontrivial solution **\n";
            } else {
                std::cout << pr.id << ": sigma=" << sigma
                          << " tau=" << tau << " rejected ("
                          << reject_name(std::get<thue::PullbackReject>(res))
                          << ")\n";
            }
        }
    }
    return nontrivial ? 3 : 0;
}

int cmd_ingest(const std::string& problems_path,
               const std::string& results_path) {
    std::ifstream pin(problems_path);
    if (!pin) {
        std::cerr << "error: cannot open " << problems_path << "\n";
        return 2;
    }
    auto probs = thue::import_problems(pin);
    std::ifstream rin(results_path);
    if (!rin) {
        std::cerr << "error: cannot open " << results_path << "\n";
        return 2;
    }
    auto results = thue::ingest_results(probs, rin);

    size_t closed = 0, with_solutions = 0;
    std::vector<std::string> seen;
    for (const auto& res : results) {
        seen.push_back(res.id);
        if (res.no_solutions) {
            ++closed;
            std::cout << res.id << ": no solutions (" << res.solver
                      << ")\n";
        } else {
            ++with_solutions;
            std::cout << res.id << ": " << res.solutions.size()
                      << " solution(s) verified (" << res.solver << ")\n";
        }
    }
    std::sort(seen.begin(), seen.end());
    size_t open = 0;
    for (const auto& pr : probs)
        if (!std::binary_search(seen.begin(), seen.end(), pr.id)) {
            ++open;
            std::cout << pr.id << ": no result ingested\n";
        }
    std::cout << probs.size() << " problems: " << closed
              << " closed empty, " << with_solutions
              << " with verified solutions, " << open << " open\n";
    return open == 0 && with_solutions == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "staged elimination for (x-r)^3 + x^3 + (x+r)^3 = y^p, "
        "gcd(x, r) = 1"};
    app.require_subcommand(1);

    auto* run =
        app.add_subcommand("run", "run the staged pipeline over an r range");
    pipeline::Config cfg;
    std::vector<int> case_ints{1, 2, 3, 4};
    std::string table_fmt = "csv";
    std::string resume_state;
    run->add_option("--r-min", cfg.r_min, "smallest r (default 1)");
    run->add_option("--r-max", cfg.r_max, "largest r (default 1000000)");
    run->add_option("--cases", case_ints, "cases to run, e.g. 3,4")
        ->delimiter(',');
    run->add_option("--k-max", cfg.k_max,
                    "witness depth for sieve and descent (default 400)");
    run->add_option("--jobs", cfg.jobs, "worker threads (default 1)");
    run->add_flag("--audit", cfg.audit,
                  "disable trusted rules and run every sieve chain");
    run->add_option("--p-cap", cfg.p_cap,
                    "extra cap on the exponent (testing aid)");
    run->add_flag("--progress", cfg.progress,
                  "per-unit progress on stderr");
    run->add_option("--out", cfg.out_dir,
                    "output directory (checkpointed, resumable)");
    run->add_option("--table", table_fmt, "csv or markdown")
        ->check(CLI::IsMember({"csv", "markdown"}));
    run->add_option("--resume", resume_state,
                    "state.json of an earlier run to resume");

    auto* search = app.add_subcommand(
        "thue-search", "bounded search over exported Thue problems");
    std::string problems_path;
    long long bound = 10000;
    search->add_option("--problems", problems_path, "problems file")
        ->required();
    search->add_option("--bound", bound,
                       "scan |sigma|, |tau| <= bound (default 10000)");

    auto* ingest = app.add_subcommand(
        "thue-ingest", "verify and summarize external solver results");
    std::string problems_path2, results_path;
    ingest->add_option("--problems", problems_path2, "problems file")
        ->required();
    ingest->add_option("--results", results_path, "results file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(cfg, case_ints, table_fmt, resume_state);
        if (search->parsed())
            return cmd_search(problems_path, bound);
        if (ingest->parsed())
            return cmd_ingest(problems_path2, results_path);
    } catch (const pipeline::ConfigMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const thue::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const thue::VerificationError& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
