#include "cubesum/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "cubesum/arith.hpp"
#include "cubesum/descent.hpp"
#include "cubesum/localsolve.hpp"
#include "cubesum/mignotte.hpp"
#include "cubesum/rules.hpp"
#include "cubesum/sieve.hpp"
#include "cubesum/thue.hpp"

namespace cubesum {
namespace pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr uint64_t kDescentGuard = 1'000'000;

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---- per-unit work: one (case, p), r varying inside ----

struct UnitResult {
    Case label{};
    uint32_t p = 0;
    StageCounts counts;
    std::vector<SurvivorRecord> survivors;
};

// Keep or drop each r according to one witness prime: c(r) = c1 * r^2 must
// land in the residues mod q that leave B(p, q) nonempty.  That set is
// {a*t - b*zeta : t^(2k) in {0,1}, zeta in mu}, so for long r lists a
// bitmask over F_q beats evaluating the membership test per r.
void filter_by_witness(const sieve::WitnessContext& ctx, const Int& c1,
                       std::vector<uint32_t>& alive) {
    const uint64_t q = ctx.w.q;
    const uint64_t k = ctx.w.k;
    const uint64_t c1m = mpz_fdiv_ui(c1.get_mpz_t(), q);
    auto c_of_r = [&](uint32_t r) {
        uint64_t rm = r % q;
        return arith::mulmod(c1m, arith::mulmod(rm, rm, q), q);
    };
    std::vector<uint32_t> next;
    next.reserve(alive.size());
    const uint64_t direct_cost = alive.size() * (k + 1);
    const uint64_t mask_cost = (2 * k + 1) * (k + 1) + q / 32;
    if (direct_cost <= mask_cost) {
        for (uint32_t r : alive)
            if (ctx.b_set_nonempty(c_of_r(r)))
                next.push_back(r);
    } else {
        std::vector<uint64_t> mask((q >> 6) + 1, 0);
        for (uint64_t t : ctx.pth_powers) {
            uint64_t at = arith::mulmod(ctx.a_mod, t, q);
            for (uint64_t z : ctx.mu) {
                uint64_t c = at + q - arith::mulmod(ctx.b_mod, z, q);
                if (c >= q)
                    c -= q;
                mask[c >> 6] |= uint64_t{1} << (c & 63);
            }
        }
        for (uint32_t r : alive) {
            uint64_t c = c_of_r(r);
            if (mask[c >> 6] >> (c & 63) & 1)
                next.push_back(r);
        }
    }
    alive.swap(next);
}

using FacU = std::vector<std::pair<uint64_t, unsigned>>;

// Factorization of c1 * r^2 from the smallest-prime-factor table.
FacU c_factorization(const FacU& c1_fac, uint32_t r,
                     const std::vector<uint32_t>& spf) {
    FacU rf;
    uint32_t n = r;
    while (n > 1) {
        uint32_t f = spf[n];
        unsigned e = 0;
        while (n % f == 0) {
            n /= f;
            ++e;
        }
        rf.emplace_back(f, 2 * e);
    }
    FacU out;
    out.reserve(rf.size() + c1_fac.size());
    size_t i = 0, j = 0;
    while (i < c1_fac.size() || j < rf.size()) {
        if (j == rf.size() ||
            (i < c1_fac.size() && c1_fac[i].first < rf[j].first))
            out.push_back(c1_fac[i++]);
        else if (i == c1_fac.size() || rf[j].first < c1_fac[i].first)
            out.push_back(rf[j++]);
        else {
            out.emplace_back(rf[j].first, c1_fac[i].second + rf[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

UnitResult run_unit(const Config& cfg, Case label, uint32_t p) {
    UnitResult u;
    u.label = label;
    u.p = p;

    TernaryEquation base = casesplit::build_case_equation(label, 1, p);
    const Int c1 = base.c; // c(r) = c1 * r^2

    std::vector<uint32_t> alive;
    for (uint32_t r = std::max(cfg.r_min, 1u); r <= cfg.r_max; ++r)
        if (casesplit::admissible(label, r))
            alive.push_back(r);

    auto ctxs = sieve::witness_contexts(p, base.a, base.b, cfg.k_max);
    for (const auto& ctx : ctxs) {
        if (alive.empty())
            break;
        filter_by_witness(ctx, c1, alive);
    }
    u.counts.after_sieve = alive.size();

    localsolve::LocalCache cache{base.a, base.b, p, {}, {}};
    FacU c1_fac;
    for (const auto& [f, e] : arith::factorize(c1))
        c1_fac.emplace_back(f.get_ui(), e);
    const auto& spf = arith::spf_table();

    std::vector<std::pair<uint32_t, localsolve::ReducedEquation>> reds;
    for (uint32_t r : alive) {
        Int C = c1 * Int(uint64_t(r) * r);
        auto ro = localsolve::reduce_to_coprime(base.a, base.b, C, p);
        if (!ro.red)
            continue;
        auto& red = *ro.red;
        if (localsolve::qr_obstruction(red))
            continue;
        SieveOutcome so =
            red.log.empty()
                ? localsolve::local_sieve_cached(
                      cache, red.C, c_factorization(c1_fac, r, spf))
                : localsolve::local_sieve(red);
        if (so.eliminated)
            continue;
        reds.emplace_back(r, std::move(red));
    }
    u.counts.after_local = reds.size();

    std::vector<std::pair<uint32_t, localsolve::ReducedEquation>> surv;
    for (auto& [r, red] : reds) {
        SieveOutcome so = descent::descent_sieve(red, cfg.k_max,
                                                 kDescentGuard);
        if (!so.eliminated)
            surv.emplace_back(r, std::move(red));
    }
    u.counts.after_descent = surv.size();

    const std::string ts = now_utc();
    for (auto& [r, red] : surv) {
        SurvivorRecord rec;
        rec.r = r;
        rec.label = label;
        rec.p = p;
        rec.a = red.A.get_str();
        rec.b = red.B.get_str();
        rec.c = red.C.get_str();
        rec.timestamp = ts;
        if (!cfg.audit) {
            if (auto v = rules::modularity_power_of_two(label, r, p)) {
                rec.terminal = StageId::TrustedRules;
                rec.witness = v->rule_id;
                u.survivors.push_back(std::move(rec));
                continue;
            }
        }
        rec.terminal = StageId::ThueExport;
        rec.witness = thue::to_thue(red, label, r).id;
        u.survivors.push_back(std::move(rec));
    }
    return u;
}

// ---- checkpoint files ----

fs::path part_path(const Config& cfg, Case label, uint32_t p) {
    return fs::path(cfg.out_dir) / "parts" /
           ("case" + std::to_string(static_cast<int>(label)) + "_p" +
            std::to_string(p) + ".jsonl");
}

json survivor_json(const SurvivorRecord& s) {
    return json{{"type", "survivor"},
                {"r", s.r},
                {"case", static_cast<int>(s.label)},
                {"p", s.p},
                {"a", s.a},
                {"b", s.b},
                {"c", s.c},
                {"terminal", stage_name(s.terminal)},
                {"witness", s.witness},
                {"timestamp", s.timestamp}};
}

SurvivorRecord survivor_from_json(const json& j) {
    SurvivorRecord s;
    s.r = j.at("r").get<uint32_t>();
    int cs = j.at("case").get<int>();
    if (cs < 1 || cs > 4)
        throw std::invalid_argument("case out of range");
    s.label = static_cast<Case>(cs);
    s.p = j.at("p").get<uint32_t>();
    s.a = j.at("a").get<std::string>();
    s.b = j.at("b").get<std::string>();
    s.c = j.at("c").get<std::string>();
    s.terminal = stage_from_name(j.at("terminal").get<std::string>());
    s.witness = j.at("witness").get<std::string>();
    s.timestamp = j.at("timestamp").get<std::string>();
    return s;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed: " + path.string());
    }
    fs::rename(tmp, path);
}

void write_part(const fs::path& path, const UnitResult& u) {
    std::ostringstream body;
    json head{{"type", "unit"},
              {"case", static_cast<int>(u.label)},
              {"p", u.p},
              {"stage1", u.counts.after_sieve},
              {"stage2", u.counts.after_local},
              {"stage3", u.counts.after_descent}};
    body << head.dump() << '\n';
    for (const auto& s : u.survivors)
        body << survivor_json(s).dump() << '\n';
    atomic_write(path, body.str());
}

std::optional<UnitResult> read_part(const fs::path& path, Case label,
                                    uint32_t p) {
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    try {
        std::string line;
        if (!std::getline(in, line))
            return std::nullopt;
        json head = json::parse(line);
        if (head.at("type").get<std::string>() != "unit" ||
            head.at("case").get<int>() != static_cast<int>(label) ||
            head.at("p").get<uint32_t>() != p)
            return std::nullopt;
        UnitResult u;
        u.label = label;
        u.p = p;
        u.counts.after_sieve = head.at("stage1").get<uint64_t>();
        u.counts.after_local = head.at("stage2").get<uint64_t>();
        u.counts.after_descent = head.at("stage3").get<uint64_t>();
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            json j = json::parse(line);
            if (j.at("type").get<std::string>() != "survivor")
                return std::nullopt;
            u.survivors.push_back(survivor_from_json(j));
        }
        if (u.survivors.size() != u.counts.after_descent)
            return std::nullopt;
        return u;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

uint32_t cap_for_case(const Config& cfg, Case label) {
    auto mg = mignotte::exponent_cap(label, Int(cfg.r_max));
    // Even-x cases carry no proven cap of their own (trusted rules close
    // them); audit runs borrow the case-3 bound as a working limit.
    uint32_t cap = mg ? *mg : 24000;
    if (cfg.p_cap > 0)
        cap = std::min(cap, cfg.p_cap);
    return cap;
}

} // namespace

const char* stage_name(StageId s) {
    switch (s) {
    case StageId::CaseBuild:
        return "case-build";
    case StageId::TrustedRules:
        return "trusted-rules";
    case StageId::PrimarySieve:
        return "primary-sieve";
    case StageId::LocalSolubility:
        return "local-solubility";
    case StageId::Descent:
        return "descent";
    case StageId::ThueExport:
        return "thue-export";
    }
    return "unknown";
}

StageId stage_from_name(const std::string& name) {
    for (StageId s :
         {StageId::CaseBuild, StageId::TrustedRules, StageId::PrimarySieve,
          StageId::LocalSolubility, StageId::Descent, StageId::ThueExport})
        if (name == stage_name(s))
            return s;
    throw std::invalid_argument("unknown stage name: " + name);
}

std::string config_digest(const Config& cfg) {
    std::vector<int> cases;
    for (Case c : cfg.cases)
        cases.push_back(static_cast<int>(c));
    std::sort(cases.begin(), cases.end());
    cases.erase(std::unique(cases.begin(), cases.end()), cases.end());

    std::string s = "r_min=" + std::to_string(cfg.r_min) +
                    ";r_max=" + std::to_string(cfg.r_max) + ";cases=";
    for (int c : cases)
        s += std::to_string(c) + ",";
    s += ";k_max=" + std::to_string(cfg.k_max) +
         ";audit=" + std::to_string(cfg.audit ? 1 : 0) +
         ";p_cap=" + std::to_string(cfg.p_cap);

    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

Report run_range(const Config& cfg_in) {
    Config cfg = cfg_in;
    if (cfg.r_min < 1)
        cfg.r_min = 1;
    if (cfg.r_min > cfg.r_max)
        throw std::invalid_argument("empty r range");
    if (cfg.cases.empty())
        throw std::invalid_argument("no cases selected");
    if (cfg.k_max < 1)
        throw std::invalid_argument("k_max must be positive");
    if (cfg.jobs < 1)
        cfg.jobs = 1;
    std::sort(cfg.cases.begin(), cfg.cases.end(),
              [](Case a, Case b) {
                  return static_cast<int>(a) < static_cast<int>(b);
              });
    cfg.cases.erase(std::unique(cfg.cases.begin(), cfg.cases.end()),
                    cfg.cases.end());

    Report rep;
    rep.config = cfg;
    rep.digest = config_digest(cfg);

    const bool persist = !cfg.out_dir.empty();
    if (persist) {
        fs::create_directories(fs::path(cfg.out_dir) / "parts");
        fs::path state = fs::path(cfg.out_dir) / "state.json";
        if (fs::exists(state)) {
            std::ifstream in(state);
            json j = json::parse(in, nullptr, false);
            std::string stored =
                j.is_object() ? j.value("digest", "") : "";
            if (stored != rep.digest)
                throw ConfigMismatch(
                    "state file " + state.string() +
                    " belongs to a different configuration (digest " +
                    stored + ", expected " + rep.digest + ")");
        } else {
            atomic_write(state,
                         json{{"digest", rep.digest}}.dump() + "\n");
        }
    }

    struct Unit {
        Case label;
        uint32_t p;
    };
    std::vector<Unit> units;
    for (Case label : cfg.cases) {
        uint32_t cap = cap_for_case(cfg, label);
        rep.p_cap[static_cast<int>(label)] = cap;
        const int ci = static_cast<int>(label);
        if (!cfg.audit && (label == Case::C1 || label == Case::C2)) {
            rep.notes.push_back("case " + std::to_string(ci) +
                                ": p = 5 closed by chabauty-p5; every "
                                "prime p >= 7 closed by "
                                "modularity-even-x");
            continue;
        }
        uint32_t lo = 5;
        if (!cfg.audit && label == Case::C3) {
            rep.notes.push_back("case 3: p = 5 closed by chabauty-p5");
            lo = 7;
        }
        if (lo >= cap)
            continue;
        for (uint32_t p : arith::primes_in_range(lo, cap))
            units.push_back({label, p});
    }

    std::vector<UnitResult> results(units.size());
    std::atomic<size_t> cursor{0};
    std::mutex io_mtx;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= units.size())
                return;
            const Unit unit = units[i];
            try {
                auto t0 = std::chrono::steady_clock::now();
                std::optional<UnitResult> got;
                if (persist)
                    got = read_part(part_path(cfg, unit.label, unit.p),
                                    unit.label, unit.p);
                bool resumed = got.has_value();
                if (!got) {
                    got = run_unit(cfg, unit.label, unit.p);
                    if (persist)
                        write_part(part_path(cfg, unit.label, unit.p),
                                   *got);
                }
                if (cfg.progress) {
                    double secs =
                        std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
                    std::lock_guard<std::mutex> lock(io_mtx);
                    std::cerr << "case "
                              << static_cast<int>(unit.label)
                              << " p=" << unit.p
                              << (resumed ? " (resumed)" : "") << ": "
                              << got->counts.after_sieve << " / "
                              << got->counts.after_local << " / "
                              << got->counts.after_descent << "  ["
                              << std::fixed << std::setprecision(1)
                              << secs << "s]\n";
                }
                results[i] = std::move(*got);
            } catch (...) {
                std::lock_guard<std::mutex> lock(io_mtx);
                if (!first_error)
                    first_error = std::current_exception();
                cursor.store(units.size());
                return;
            }
        }
    };

    if (cfg.jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        size_t n = std::min<size_t>(cfg.jobs, std::max<size_t>(
                                                  units.size(), 1));
        for (size_t t = 0; t < n; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    for (auto& u : results) {
        assert(u.counts.after_local <= u.counts.after_sieve &&
               u.counts.after_descent <= u.counts.after_local);
        rep.rows[{static_cast<int>(u.label), u.p}] = u.counts;
        for (auto& s : u.survivors)
            rep.survivors.push_back(std::move(s));
    }
    std::sort(rep.survivors.begin(), rep.survivors.end(),
              [](const SurvivorRecord& x, const SurvivorRecord& y) {
                  return std::tuple(static_cast<int>(x.label), x.p, x.r) <
                         std::tuple(static_cast<int>(y.label), y.p, y.r);
              });

    if (persist) {
        std::ostringstream sv;
        for (const auto& s : rep.survivors)
            sv << survivor_json(s).dump() << '\n';
        atomic_write(fs::path(cfg.out_dir) / "survivors.jsonl", sv.str());

        std::vector<thue::ThueProblem> probs;
        for (const auto& s : rep.survivors) {
            if (s.terminal != StageId::ThueExport)
                continue;
            thue::ThueProblem pr;
            pr.id = s.witness;
            pr.a = Int(s.a);
            pr.b = Int(s.b);
            pr.c = Int(s.c);
            pr.p = s.p;
            pr.from = {s.label, s.r};
            probs.push_back(std::move(pr));
        }
        std::ostringstream tp;
        thue::export_problems(probs, tp);
        atomic_write(fs::path(cfg.out_dir) / "thue_problems.jsonl",
                     tp.str());

        for (Case label : cfg.cases) {
            atomic_write(fs::path(cfg.out_dir) /
                             ("report_case" +
                              std::to_string(static_cast<int>(label)) +
                              ".csv"),
                         render_table(rep, label, "csv"));
        }

        json echo{{"r_min", cfg.r_min},
                  {"r_max", cfg.r_max},
                  {"k_max", cfg.k_max},
                  {"jobs", cfg.jobs},
                  {"audit", cfg.audit},
                  {"p_cap", cfg.p_cap},
                  {"out_dir", cfg.out_dir},
                  {"digest", rep.digest}};
        json cs = json::array();
        for (Case c : cfg.cases)
            cs.push_back(static_cast<int>(c));
        echo["cases"] = cs;
        atomic_write(fs::path(cfg.out_dir) / "config.json",
                     echo.dump(2) + "\n");
    }
    return rep;
}

std::string render_table(const Report& rep, Case c,
                         const std::string& format) {
    bool md;
    if (format == "markdown")
        md = true;
    else if (format == "csv")
        md = false;
    else
        throw std::invalid_argument("unknown table format: " + format);

    std::vector<std::pair<uint32_t, StageCounts>> rows;
    for (const auto& [key, cnt] : rep.rows)
        if (key.first == static_cast<int>(c))
            rows.emplace_back(key.second, cnt);

    uint32_t last_nonzero = 0;
    StageCounts tot;
    for (const auto& [p, cnt] : rows) {
        if (cnt.after_sieve || cnt.after_local || cnt.after_descent)
            last_nonzero = p;
        tot.after_sieve += cnt.after_sieve;
        tot.after_local += cnt.after_local;
        tot.after_descent += cnt.after_descent;
    }

    auto itc = rep.p_cap.find(static_cast<int>(c));
    uint32_t cap = itc == rep.p_cap.end() ? 0 : itc->second;

    std::ostringstream out;
    auto row = [&](const std::string& label, uint64_t s1, uint64_t s2,
                   uint64_t s3) {
        if (md)
            out << "| " << label << " | " << s1 << " | " << s2 << " | "
                << s3 << " |\n";
        else
            out << label << ',' << s1 << ',' << s2 << ',' << s3 << '\n';
    };

    if (md) {
        out << "| p | stage1_count | stage2_count | stage3_count |\n";
        out << "|---:|---:|---:|---:|\n";
    } else {
        out << "p,stage1_count,stage2_count,stage3_count\n";
    }

    uint32_t first_tail = 0;
    for (const auto& [p, cnt] : rows) {
        if (p <= last_nonzero)
            row(std::to_string(p), cnt.after_sieve, cnt.after_local,
                cnt.after_descent);
        else if (first_tail == 0)
            first_tail = p;
    }
    if (first_tail != 0) {
        std::string label =
            md ? std::to_string(first_tail) + " <= p < " +
                     std::to_string(cap)
               : std::to_string(first_tail) + "<=p<" + std::to_string(cap);
        row(label, 0, 0, 0);
    }
    row("total", tot.after_sieve, tot.after_local, tot.after_descent);
    return out.str();
}

} // namespace pipeline
} // namespace cubesum
