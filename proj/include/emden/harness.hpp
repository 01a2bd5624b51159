#pragma once

// Orchestration behind the command-line tool: case expansion, the worker
// pool, and CSV/JSON report emission.

#include "emden/bounds.hpp"
#include "emden/certify.hpp"

#include <json.hpp>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace emden {

enum class Mode { Certify, Calibrate, Profile };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view text);

struct SweepConfig {
    Variant variant = Variant::Absorption;
    std::vector<int> n;
    std::vector<double> q;
    std::vector<double> d;
    std::vector<double> k;
    std::size_t grid_size = 1025;
    Grading grading = Grading::Geometric;
    Mode mode = Mode::Certify;
    std::string out_dir = ".";
    /// Profile CSV path for a single case; output directory for sweeps.
    std::optional<std::string> emit_profile;
    /// 0 selects the number of logical CPUs.
    unsigned jobs = 0;
    std::size_t max_cases = 10'000;
    int ladder_steps = 3;
};

/// Reads the keys of SweepConfig from a JSON object on top of `base`.
/// Scalars are accepted where lists are expected. Throws Error(InvalidConfig).
SweepConfig sweep_from_json(const nlohmann::json& j, SweepConfig base = {});

/// Cartesian product in n, q, d, k order (q ignored for Laplace).
/// Throws InvalidConfig for empty lists, CapExceeded above max_cases, and the
/// validation error of the first invalid case.
std::vector<ProblemSpec> expand_cases(const SweepConfig& config);

/// %.17g, the format used for every number in CSV output.
std::string format_number(double v);

/// Header r,u,residual followed by one column per bound key.
void write_profile_csv(std::ostream& os, const CertifyOutcome& outcome);

struct CaseRow {
    std::size_t index = 0;
    ProblemSpec spec;
    std::optional<Certificate> certificate;
    std::string error;
};

/// Summary table: one row per case, margin columns in sorted key order.
void write_summary_csv(std::ostream& os, const std::vector<CaseRow>& rows);

void write_calibration_csv(std::ostream& os, const CalibrationResult& result);
nlohmann::json to_json(const CalibrationResult& result);

/// Runs task(i) for i in [0, count) on at most `jobs` threads.
void run_parallel(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

/// Certificates for every case, ordered by case index.
std::vector<CaseRow> certify_cases(const std::vector<ProblemSpec>& cases, const CertifyConfig& config,
                                   unsigned jobs);

struct PrincipalTermRow {
    double d = 0.0;
    double exact_c1 = 0.0;
    double principal = 0.0;
    double ratio = 0.0;
};

/// Exact C1 of the quadratic-source lower bound against its claimed small-d
/// leading term, at each requested inner radius.
std::vector<PrincipalTermRow> principal_term_report(ProblemSpec base, const std::vector<double>& radii);
void write_principal_csv(std::ostream& os, const std::vector<PrincipalTermRow>& rows);

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files;
};

/// Exit codes: 0 certified, 1 caveats (single case) or any failed case
/// (sweep), 2 failed single case, 3 usage or validation error. Nothing is
/// written when the result is 3; the message goes to `err`.
RunResult run(const SweepConfig& config, std::ostream& out, std::ostream& err);

}  // namespace emden
