#include "emden/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace emden {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Certify: return "certify";
    case Mode::Calibrate: return "calibrate";
    case Mode::Profile: return "profile";
    }
    return "certify";
}

std::optional<Mode> parse_mode(std::string_view text) {
    if (text == "certify") return Mode::Certify;
    if (text == "calibrate") return Mode::Calibrate;
    if (text == "profile") return Mode::Profile;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

template <class T>
std::vector<T> list_of(const json& value, const char* key) {
    try {
        if (value.is_array()) return value.get<std::vector<T>>();
        return {value.get<T>()};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T scalar_of(const json& value, const char* key) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

SweepConfig sweep_from_json(const json& j, SweepConfig base) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    static const std::set<std::string> known = {"variant", "n", "q", "d", "k", "grid_size", "grading",
                                                "mode", "out_dir", "emit_profile", "jobs", "max_cases",
                                                "ladder_steps"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");

    if (j.contains("variant")) {
        const auto v = parse_variant(scalar_of<std::string>(j["variant"], "variant"));
        if (!v) throw Error(ErrorCode::InvalidConfig, "variant must be absorption, source or laplace");
        base.variant = *v;
    }
    if (j.contains("n")) base.n = list_of<int>(j["n"], "n");
    if (j.contains("q")) base.q = list_of<double>(j["q"], "q");
    if (j.contains("d")) base.d = list_of<double>(j["d"], "d");
    if (j.contains("k")) base.k = list_of<double>(j["k"], "k");
    if (j.contains("grid_size")) base.grid_size = scalar_of<std::size_t>(j["grid_size"], "grid_size");
    if (j.contains("grading")) {
        const auto g = parse_grading(scalar_of<std::string>(j["grading"], "grading"));
        if (!g) throw Error(ErrorCode::InvalidConfig, "grading must be uniform or geometric");
        base.grading = *g;
    }
    if (j.contains("mode")) {
        const auto m = parse_mode(scalar_of<std::string>(j["mode"], "mode"));
        if (!m) throw Error(ErrorCode::InvalidConfig, "mode must be certify, calibrate or profile");
        base.mode = *m;
    }
    if (j.contains("out_dir")) base.out_dir = scalar_of<std::string>(j["out_dir"], "out_dir");
    if (j.contains("emit_profile")) base.emit_profile = scalar_of<std::string>(j["emit_profile"], "emit_profile");
    if (j.contains("jobs")) base.jobs = scalar_of<unsigned>(j["jobs"], "jobs");
    if (j.contains("max_cases")) base.max_cases = scalar_of<std::size_t>(j["max_cases"], "max_cases");
    if (j.contains("ladder_steps")) base.ladder_steps = scalar_of<int>(j["ladder_steps"], "ladder_steps");
    return base;
}

std::vector<ProblemSpec> expand_cases(const SweepConfig& config) {
    const bool laplace = config.variant == Variant::Laplace;
    if (config.n.empty()) throw Error(ErrorCode::InvalidConfig, "the n list is empty");
    if (config.d.empty()) throw Error(ErrorCode::InvalidConfig, "the d list is empty");
    if (config.k.empty()) throw Error(ErrorCode::InvalidConfig, "the k list is empty");
    if (config.q.empty() && !laplace) throw Error(ErrorCode::InvalidConfig, "the q list is empty");
    if (config.ladder_steps < 1) throw Error(ErrorCode::InvalidConfig, "ladder_steps must be at least 1");
    if (config.grid_size < RadialGrid::kMinNodes)
        throw Error(ErrorCode::TooFewNodes, "grid_size must be at least 8");

    const std::vector<double> qs = laplace ? std::vector<double>{config.q.empty() ? 2.0 : config.q.front()}
                                           : config.q;
    const std::size_t total = config.n.size() * qs.size() * config.d.size() * config.k.size();
    if (total > config.max_cases)
        throw Error(ErrorCode::CapExceeded, std::to_string(total) + " cases exceed the cap of " +
                                                std::to_string(config.max_cases));

    std::vector<ProblemSpec> cases;
    cases.reserve(total);
    for (int n : config.n)
        for (double q : qs)
            for (double d : config.d)
                for (double k : config.k) cases.push_back(validate_spec({n, q, d, k, config.variant}));
    return cases;
}

// ---------------------------------------------------------------------------
// Reports

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_profile_csv(std::ostream& os, const CertifyOutcome& outcome) {
    const Profile& u = outcome.solution;
    const Profile residual = residual_profile(u, outcome.certificate.spec);
    std::vector<std::pair<std::string, const Profile*>> columns;
    for (const Bound& b : outcome.bounds.uppers) columns.emplace_back(bound_key(b, true), &b.profile);
    for (const Bound& b : outcome.bounds.lowers) columns.emplace_back(bound_key(b, false), &b.profile);

    os << "r,u,residual";
    for (const auto& [name, p] : columns) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < u.size(); ++i) {
        os << format_number(u.grid()[i]) << ',' << format_number(u[i]) << ',' << format_number(residual[i]);
        for (const auto& [name, p] : columns) os << ',' << format_number((*p)[i]);
        os << '\n';
    }
}

void write_summary_csv(std::ostream& os, const std::vector<CaseRow>& rows) {
    std::set<std::string> keys;
    for (const auto& row : rows)
        if (row.certificate)
            for (const auto& m : row.certificate->margins) keys.insert(m.key);

    os << "index,variant,n,q,d,k,verdict,solver_gap,residual_norm,positivity_margin,ordering_margin";
    for (const auto& key : keys) os << ',' << key;
    os << ",caveats,error\n";
    for (const auto& row : rows) {
        const ProblemSpec& s = row.spec;
        os << row.index << ',' << to_string(s.variant) << ',' << s.n << ',' << format_number(s.q) << ','
           << format_number(s.d) << ',' << format_number(s.k) << ',';
        if (!row.certificate) {
            os << "Failed,,,,";
            for (std::size_t i = 0; i < keys.size(); ++i) os << ',';
            os << ",," << '"' << row.error << '"' << '\n';
            continue;
        }
        const Certificate& c = *row.certificate;
        os << to_string(c.verdict) << ',' << format_number(c.solver_gap) << ',' << format_number(c.residual_norm)
           << ',' << format_number(c.positivity_margin) << ','
           << (std::isfinite(c.ordering_margin) ? format_number(c.ordering_margin) : std::string());
        for (const auto& key : keys) {
            os << ',';
            for (const auto& m : c.margins)
                if (m.key == key) os << format_number(m.margin);
        }
        os << ',';
        for (std::size_t i = 0; i < c.caveats.size(); ++i) os << (i ? ";" : "") << c.caveats[i];
        os << ",\n";
    }
}

void write_calibration_csv(std::ostream& os, const CalibrationResult& result) {
    os << "d,c,c1,c2\n";
    for (const auto& level : result.levels)
        os << format_number(level.d) << ',' << format_number(level.c) << ',' << format_number(level.c1) << ','
           << format_number(level.c2) << '\n';
}

json to_json(const CalibrationResult& r) {
    json j;
    j["variant"] = std::string(to_string(r.variant));
    j["c"] = r.c;
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["stability"] = std::isfinite(r.stability) ? json(r.stability) : json(nullptr);
    json cases = json::array();
    for (const auto& c : r.cases) cases.push_back({{"spec", to_json(c.spec)}, {"max_ratio", c.max_ratio}});
    j["cases"] = cases;
    json levels = json::array();
    for (const auto& l : r.levels) levels.push_back({{"d", l.d}, {"c", l.c}, {"c1", l.c1}, {"c2", l.c2}});
    j["levels"] = levels;
    return j;
}

std::vector<PrincipalTermRow> principal_term_report(ProblemSpec base, const std::vector<double>& radii) {
    std::vector<PrincipalTermRow> rows;
    for (double d : radii) {
        base.d = d;
        const CoefficientSet c = theorem2_coefficients(base);
        rows.push_back({d, c.c1, c.principal, c.c1 / c.principal});
    }
    return rows;
}

void write_principal_csv(std::ostream& os, const std::vector<PrincipalTermRow>& rows) {
    os << "d,exact_c1,principal_term,ratio\n";
    for (const auto& r : rows)
        os << format_number(r.d) << ',' << format_number(r.exact_c1) << ',' << format_number(r.principal) << ','
           << format_number(r.ratio) << '\n';
}

// ---------------------------------------------------------------------------
// Execution

void run_parallel(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

CertifyConfig certify_config(const SweepConfig& config) {
    CertifyConfig cc;
    cc.grid_size = config.grid_size;
    cc.grading = config.grading;
    cc.ladder_steps = config.ladder_steps;
    return cc;
}

struct CaseOutcome {
    std::optional<CertifyOutcome> outcome;
    std::string error;
};

std::vector<CaseOutcome> solve_all(const std::vector<ProblemSpec>& cases, const CertifyConfig& cc, unsigned jobs) {
    std::vector<CaseOutcome> results(cases.size());
    run_parallel(cases.size(), jobs, [&](std::size_t i) {
        try {
            results[i].outcome = certify_detailed(cases[i], cc);
        } catch (const Error& e) {
            results[i].error = e.what();
        }
    });
    return results;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body, RunResult& result) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
    body(os);
    result.files.push_back(path.string());
}

void write_json(const fs::path& path, const json& j, RunResult& result) {
    write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; }, result);
}

std::string case_name(const char* stem, std::size_t index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, index, ext);
    return buf;
}

}  // namespace

std::vector<CaseRow> certify_cases(const std::vector<ProblemSpec>& cases, const CertifyConfig& config,
                                   unsigned jobs) {
    auto outcomes = solve_all(cases, config, jobs);
    std::vector<CaseRow> rows(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        rows[i].index = i;
        rows[i].spec = cases[i];
        if (outcomes[i].outcome)
            rows[i].certificate = outcomes[i].outcome->certificate;
        else
            rows[i].error = outcomes[i].error;
    }
    return rows;
}

RunResult run(const SweepConfig& config, std::ostream& out, std::ostream& err) {
    RunResult result;
    std::vector<ProblemSpec> cases;
    try {
        cases = expand_cases(config);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = 3;
        return result;
    }

    const CertifyConfig cc = certify_config(config);
    const fs::path dir(config.out_dir);
    const bool single = cases.size() == 1;
    auto outcomes = solve_all(cases, cc, config.jobs);

    // Single case: --emit-profile names the file. Sweeps: it names a directory.
    auto profile_path = [&](std::size_t i) {
        if (single) return config.emit_profile ? fs::path(*config.emit_profile) : dir / "profile.csv";
        const fs::path base = config.emit_profile ? fs::path(*config.emit_profile) : dir;
        return base / case_name("profile", i, ".csv");
    };

    switch (config.mode) {
    case Mode::Certify: {
        std::vector<CaseRow> rows(cases.size());
        bool any_failed = false;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            rows[i].index = i;
            rows[i].spec = cases[i];
            const fs::path json_path = single ? dir / "certificate.json" : dir / case_name("case", i, ".json");
            if (!outcomes[i].outcome) {
                rows[i].error = outcomes[i].error;
                any_failed = true;
                json j{{"spec", to_json(cases[i])}, {"verdict", "Failed"}, {"error", outcomes[i].error}};
                write_json(json_path, j, result);
                err << "case " << i << ": " << outcomes[i].error << '\n';
                continue;
            }
            const CertifyOutcome& o = *outcomes[i].outcome;
            rows[i].certificate = o.certificate;
            any_failed = any_failed || o.certificate.verdict == Verdict::Failed;
            write_json(json_path, to_json(o.certificate), result);
            if (single || config.emit_profile)
                write_file(profile_path(i), [&](std::ostream& os) { write_profile_csv(os, o); }, result);
        }
        if (single) {
            if (!rows[0].certificate) {
                result.exit_code = 2;
            } else {
                const Verdict v = rows[0].certificate->verdict;
                result.exit_code = v == Verdict::Certified ? 0 : v == Verdict::CertifiedWithCaveats ? 1 : 2;
                out << to_string(v) << '\n';
            }
        } else {
            write_file(dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, rows); }, result);
            std::size_t certified = 0;
            for (const auto& r : rows)
                if (r.certificate && r.certificate->verdict != Verdict::Failed) ++certified;
            out << certified << " of " << rows.size() << " cases certified\n";
            result.exit_code = any_failed ? 1 : 0;
        }
        break;
    }
    case Mode::Calibrate: {
        std::vector<ProblemSpec> solved;
        std::vector<Profile> profiles;
        bool any_failed = false;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            if (!outcomes[i].outcome || outcomes[i].outcome->certificate.verdict == Verdict::Failed) {
                any_failed = true;
                err << "case " << i << " excluded from calibration"
                    << (outcomes[i].error.empty() ? std::string() : ": " + outcomes[i].error) << '\n';
                continue;
            }
            solved.push_back(cases[i]);
            profiles.push_back(outcomes[i].outcome->solution);
        }
        try {
            const CalibrationResult cal = calibrate_theorem1(solved, profiles);
            write_json(dir / "calibration.json", to_json(cal), result);
            write_file(dir / "calibration.csv", [&](std::ostream& os) { write_calibration_csv(os, cal); }, result);
            write_calibration_csv(out, cal);
            out << "stability," << format_number(cal.stability) << '\n';
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            any_failed = true;
        }
        result.exit_code = any_failed ? 1 : 0;
        break;
    }
    case Mode::Profile: {
        bool any_failed = false;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            if (!outcomes[i].outcome) {
                any_failed = true;
                err << "case " << i << ": " << outcomes[i].error << '\n';
                continue;
            }
            write_file(profile_path(i), [&](std::ostream& os) { write_profile_csv(os, *outcomes[i].outcome); },
                       result);
        }
        result.exit_code = any_failed ? (single ? 2 : 1) : 0;
        break;
    }
    }
    return result;
}

}  // namespace emden
