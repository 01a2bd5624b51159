#pragma once

// Pass/fail certificate for one problem instance: both solvers, every bound,
// positivity and residual, with explicit margins.

#include "emden/bounds.hpp"
#include "emden/bvp.hpp"
#include "emden/green.hpp"
#include "emden/problem.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace emden {

enum class Verdict { Certified, CertifiedWithCaveats, Failed };

std::string_view to_string(Verdict v);

struct BracketMargin {
    /// "<side>_<label>", lower case, e.g. "upper_eq23".
    std::string key;
    std::string label;
    bool upper = false;
    bool conditional = false;
    /// min over nodes of (upper - u) or (u - lower); negative means violated.
    double margin = 0.0;
    bool satisfied = false;
};

std::string bound_key(const Bound& bound, bool upper);

/// Throws GridMismatch when a bound lives on another grid than the solution.
std::vector<BracketMargin> check_bracketing(const Profile& solution, const BoundSet& bounds, double tol);

struct CertifyConfig {
    std::size_t grid_size = 1025;
    Grading grading = Grading::Geometric;
    QuadratureRule rule = QuadratureRule::Simpson;
    int ladder_steps = 3;
    ShootingConfig shooting;
    NewtonConfig newton;
    /// Margin, gap and positivity tolerances, each multiplied by max(1, k).
    double margin_tolerance = 1e-7;
    double gap_tolerance = 1e-6;
    double positivity_tolerance = 1e-8;
    /// Limit on residual_norm / operator scale of the certified profile.
    double relative_residual_limit = 1e-3;
};

struct Certificate {
    ProblemSpec spec;
    std::size_t grid_size = 0;
    Grading grading = Grading::Geometric;
    double tolerance = 0.0;
    double solver_gap = 0.0;
    double residual_norm = 0.0;
    double relative_residual = 0.0;
    double boundary_mismatch = 0.0;
    /// Minimum of the certified solution.
    double positivity_margin = 0.0;
    /// min (upper - lower) over the bounds that apply; +inf when none do.
    double ordering_margin = 0.0;
    std::vector<BracketMargin> margins;
    bool ladder_nested = true;
    SolveFlags flags;
    int shoot_iterations = 0;
    int newton_iterations = 0;
    std::vector<std::string> caveats;
    std::vector<std::string> failures;
    Verdict verdict = Verdict::Failed;
};

struct CertifyOutcome {
    Certificate certificate;
    /// Shooting solution (the certified profile).
    Profile solution;
    Profile fd_solution;
    /// Closed-form bounds followed by the ladder steps not already present.
    BoundSet bounds;
};

/// Throws validation errors unchanged; solver failures become Error(SolveFailed).
CertifyOutcome certify_detailed(const ProblemSpec& spec, const CertifyConfig& config = {});

inline Certificate certify(const ProblemSpec& spec, const CertifyConfig& config = {}) {
    return certify_detailed(spec, config).certificate;
}

nlohmann::json to_json(const ProblemSpec& spec);
nlohmann::json to_json(const Certificate& certificate);

}  // namespace emden
