#include "emden/certify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

namespace emden {

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Certified: return "Certified";
    case Verdict::CertifiedWithCaveats: return "CertifiedWithCaveats";
    case Verdict::Failed: return "Failed";
    }
    return "Failed";
}

std::string bound_key(const Bound& bound, bool upper) {
    std::string key = upper ? "upper_" : "lower_";
    for (char c : bound.label) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return key;
}

std::vector<BracketMargin> check_bracketing(const Profile& solution, const BoundSet& bounds, double tol) {
    std::vector<BracketMargin> out;
    auto add = [&](const Bound& b, bool upper) {
        if (!(b.profile.grid() == solution.grid()))
            throw Error(ErrorCode::GridMismatch, "bound " + b.label + " is not on the solution grid");
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < solution.size(); ++i)
            margin = std::min(margin, upper ? b.profile[i] - solution[i] : solution[i] - b.profile[i]);
        out.push_back({bound_key(b, upper), b.label, upper, b.conditional, margin, margin >= -tol});
    };
    for (const Bound& b : bounds.uppers) add(b, true);
    for (const Bound& b : bounds.lowers) add(b, false);
    return out;
}

CertifyOutcome certify_detailed(const ProblemSpec& spec, const CertifyConfig& config) {
    validate_spec(spec);
    const RadialGrid grid = make_grid(spec, config.grid_size, config.grading);
    const double scale = std::max(1.0, spec.k);
    const double tol = config.margin_tolerance * scale;

    SolveReport shot = [&] {
        try {
            return shoot(spec, grid, config.shooting);
        } catch (const Error& e) {
            throw Error(ErrorCode::SolveFailed, std::string("shooting: ") + e.what());
        }
    }();
    SolveReport fd = [&] {
        try {
            return solve_fd(spec, grid, config.newton);
        } catch (const Error& e) {
            throw Error(ErrorCode::SolveFailed, std::string("finite differences: ") + e.what());
        }
    }();

    Certificate cert;
    cert.spec = spec;
    cert.grid_size = grid.size();
    cert.grading = grid.grading();
    cert.tolerance = tol;
    cert.solver_gap = sup_distance(shot.profile, fd.profile);
    cert.residual_norm = shot.residual_norm;
    const double op_scale = operator_scale(shot.profile, spec);
    cert.relative_residual = op_scale > 0.0 ? shot.residual_norm / op_scale : shot.residual_norm;
    cert.boundary_mismatch = shot.boundary_mismatch;
    cert.positivity_margin = shot.profile.min();
    cert.flags = shot.flags;
    cert.shoot_iterations = shot.iterations;
    cert.newton_iterations = fd.iterations;

    BoundSet bounds;
    if (spec.variant != Variant::Laplace) {
        bounds = closed_form_bounds(spec, grid);
        const BoundSet ladder = bound_ladder(spec, grid, config.ladder_steps, config.rule);
        cert.ladder_nested = measure_nesting(ladder, tol).nested;
        std::set<std::string> present;
        for (const Bound& b : bounds.uppers) present.insert(bound_key(b, true));
        for (const Bound& b : bounds.lowers) present.insert(bound_key(b, false));
        for (const Bound& b : ladder.uppers)
            if (present.insert(bound_key(b, true)).second) bounds.uppers.push_back(b);
        for (const Bound& b : ladder.lowers)
            if (present.insert(bound_key(b, false)).second) bounds.lowers.push_back(b);
    }

    // Bounds that need u <= k only count when the solution respects it.
    const bool conditional_applies = !shot.flags.exceeded_k;
    cert.ordering_margin = ordering_margin(bounds, conditional_applies);
    cert.margins = check_bracketing(shot.profile, bounds, tol);

    auto fail = [&](std::string what) { cert.failures.push_back(std::move(what)); };
    auto caveat = [&](std::string what) {
        if (std::find(cert.caveats.begin(), cert.caveats.end(), what) == cert.caveats.end())
            cert.caveats.push_back(std::move(what));
    };

    if (cert.solver_gap > config.gap_tolerance * scale) fail("SolverDisagreement");
    if (cert.relative_residual > config.relative_residual_limit) fail("ResidualTooLarge");
    if (cert.positivity_margin < -config.positivity_tolerance * scale) fail("WentNegative");
    if (shot.flags.exceeded_k) {
        if (spec.variant == Variant::Source)
            caveat("ExceededK");
        else
            fail("ExceededK");
    }
    if (cert.ordering_margin < -tol) fail("BoundOrdering");

    for (const BracketMargin& m : cert.margins) {
        if (m.satisfied) continue;
        if (m.conditional && !conditional_applies) continue;
        // The quadratic lower bound is only informative for moderate k.
        if (spec.variant == Variant::Absorption && m.label == "Eq25" && spec.k > 1.0) {
            caveat("Eq25LowerViolatedLargeK");
            continue;
        }
        fail("Violated:" + m.key);
    }
    if (!cert.ladder_nested) caveat("LadderNotNested");

    if (!cert.failures.empty())
        cert.verdict = Verdict::Failed;
    else if (!cert.caveats.empty())
        cert.verdict = Verdict::CertifiedWithCaveats;
    else
        cert.verdict = Verdict::Certified;

    return {std::move(cert), std::move(shot.profile), std::move(fd.profile), std::move(bounds)};
}

nlohmann::json to_json(const ProblemSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.n;
    j["q"] = spec.q;
    j["d"] = spec.d;
    j["k"] = spec.k;
    j["variant"] = std::string(to_string(spec.variant));
    return j;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const Certificate& c) {
    nlohmann::json j;
    j["spec"] = to_json(c.spec);
    j["grid_size"] = c.grid_size;
    j["grading"] = std::string(to_string(c.grading));
    j["tolerance"] = c.tolerance;
    j["solver_gap"] = number(c.solver_gap);
    j["residual_norm"] = number(c.residual_norm);
    j["relative_residual"] = number(c.relative_residual);
    j["boundary_mismatch"] = number(c.boundary_mismatch);
    j["positivity_margin"] = number(c.positivity_margin);
    j["ordering_margin"] = number(c.ordering_margin);
    j["ladder_nested"] = c.ladder_nested;
    j["flags"] = {{"went_negative", c.flags.went_negative}, {"exceeded_k", c.flags.exceeded_k}};
    j["iterations"] = {{"shooting", c.shoot_iterations}, {"newton", c.newton_iterations}};
    nlohmann::json margins = nlohmann::json::object();
    for (const auto& m : c.margins)
        margins[m.key] = {{"label", m.label},
                          {"margin", number(m.margin)},
                          {"conditional", m.conditional},
                          {"satisfied", m.satisfied}};
    j["margins"] = margins;
    j["caveats"] = c.caveats;
    j["failures"] = c.failures;
    j["verdict"] = std::string(to_string(c.verdict));
    return j;
}

}  // namespace emden
