#include "emden/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace emden {

namespace {

Profile clamp_profile(const Profile& p, double lo, double hi) {
    std::vector<double> v(p.values().begin(), p.values().end());
    for (double& x : v) x = std::clamp(x, lo, hi);
    return Profile(p.grid(), std::move(v));
}

double min_difference(const Profile& hi, const Profile& lo) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hi.size(); ++i) worst = std::min(worst, hi[i] - lo[i]);
    return worst;
}

void require_nonlinear(const ProblemSpec& spec) {
    if (spec.variant == Variant::Laplace)
        throw Error(ErrorCode::VariantMismatch, "bounds are built for the absorption and source variants");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double ordering_margin(const BoundSet& bounds, bool include_conditional) {
    double margin = kInf;
    for (const Bound& lo : bounds.lowers) {
        if (lo.conditional && !include_conditional) continue;
        for (const Bound& up : bounds.uppers) {
            if (up.conditional && !include_conditional) continue;
            if (!(lo.profile.grid() == up.profile.grid()))
                throw Error(ErrorCode::GridMismatch, "bounds " + lo.label + " and " + up.label + " differ in grid");
            margin = std::min(margin, min_difference(up.profile, lo.profile));
        }
    }
    return margin;
}

NestingReport measure_nesting(const BoundSet& ladder, double tolerance) {
    NestingReport report;
    for (std::size_t j = 0; j + 1 < ladder.lowers.size(); ++j) {
        const double inc = min_difference(ladder.lowers[j + 1].profile, ladder.lowers[j].profile);
        report.lower_min_increase.push_back(inc);
        report.nested = report.nested && inc >= -tolerance;
    }
    for (std::size_t j = 0; j + 1 < ladder.uppers.size(); ++j) {
        const double dec = min_difference(ladder.uppers[j].profile, ladder.uppers[j + 1].profile);
        report.upper_min_decrease.push_back(dec);
        report.nested = report.nested && dec >= -tolerance;
    }
    return report;
}

BoundSet bound_ladder(const ProblemSpec& spec, const RadialGrid& grid, int steps, QuadratureRule rule) {
    validate_spec(spec);
    require_nonlinear(spec);
    if (steps < 1) throw Error(ErrorCode::InvalidConfig, "the ladder needs at least one step");

    auto step_label = [](int j) { return "PicardStep" + std::to_string(j); };
    BoundSet set;
    const double k = spec.k;

    if (spec.variant == Variant::Absorption) {
        Profile lower = Profile::constant(grid, 0.0);
        Profile upper = lower;
        for (int j = 1; j <= steps; ++j) {
            if (j % 2 == 1) {
                upper = picard_map(lower, spec, rule);
                set.uppers.push_back({j == 1 ? "Eq23" : step_label(j), upper, false});
            } else {
                lower = clamp_profile(picard_map(clamp_profile(upper, 0.0, k), spec, rule), 0.0, kInf);
                set.lowers.push_back({step_label(j), lower, false});
            }
        }
        return set;
    }

    Profile lower = Profile::constant(grid, 0.0);
    Profile upper = Profile::constant(grid, k);
    for (int j = 1; j <= steps; ++j) {
        lower = clamp_profile(picard_map(lower, spec, rule), 0.0, kInf);
        upper = picard_map(clamp_profile(upper, 0.0, k), spec, rule);
        set.lowers.push_back({j == 1 ? "Eq23" : step_label(j), lower, false});
        set.uppers.push_back({j == 1 ? "Eq25p" : step_label(j), upper, true});
    }
    return set;
}

BoundSet closed_form_bounds(const ProblemSpec& spec, const RadialGrid& grid) {
    validate_spec(spec);
    require_nonlinear(spec);
    Profile harmonic = harmonic_profile(spec, grid);
    Profile quadratic = quadratic_source_profile(spec, grid);
    BoundSet set;
    if (spec.variant == Variant::Absorption) {
        set.uppers.push_back({"Eq23", std::move(harmonic), false});
        set.lowers.push_back({"Eq25", std::move(quadratic), false});
    } else {
        set.lowers.push_back({"Eq23", std::move(harmonic), false});
        set.uppers.push_back({"Eq25p", std::move(quadratic), true});
    }
    return set;
}

// ---------------------------------------------------------------------------

namespace {

struct RatioSample {
    double ratio;      // u / (k rho)
    double nonlinear;  // k^{q-2} d^2: weight of c2 relative to c1
};

double c1_given_c2(const std::vector<RatioSample>& samples, double c2) {
    double c1 = 0.0;
    for (const auto& s : samples) c1 = std::max(c1, s.ratio - c2 * s.nonlinear);
    return c1;
}

// Nonnegative (c1, c2) minimizing max(c1, c2) subject to every sample being
// covered. c1(c2) is decreasing, so sweep c2 on a grid for the minimizing cell
// and refine the crossing c1 = c2 by bisection.
std::pair<double, double> fit_pair(const std::vector<RatioSample>& samples) {
    double c2_hi = 0.0;
    for (const auto& s : samples)
        if (s.ratio > 0.0) c2_hi = std::max(c2_hi, s.ratio / s.nonlinear);
    if (c2_hi == 0.0) return {0.0, 0.0};

    constexpr int kSweep = 1000;
    int best = 0;
    double best_value = kInf;
    for (int i = 0; i <= kSweep; ++i) {
        const double c2 = c2_hi * i / kSweep;
        const double value = std::max(c1_given_c2(samples, c2), c2);
        if (value < best_value) best_value = value, best = i;
    }
    double lo = c2_hi * std::max(best - 1, 0) / kSweep;
    double hi = c2_hi * std::min(best + 1, kSweep) / kSweep;
    if (c1_given_c2(samples, lo) < lo) return {c1_given_c2(samples, lo), lo};
    if (c1_given_c2(samples, hi) > hi) return {c1_given_c2(samples, hi), hi};
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * c2_hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (c1_given_c2(samples, mid) > mid ? lo : hi) = mid;
    }
    // hi is feasible by construction: c1(hi) <= hi.
    return {c1_given_c2(samples, hi), hi};
}

struct Fit {
    double c = 0.0, c1 = 0.0, c2 = 0.0;
};

Fit fit_constants(Variant variant, const std::vector<std::vector<RatioSample>>& groups) {
    Fit fit;
    std::vector<RatioSample> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    if (variant == Variant::Absorption) {
        std::tie(fit.c1, fit.c2) = fit_pair(all);
    } else {
        for (const auto& s : all) fit.c = std::max(fit.c, s.ratio);
    }
    return fit;
}

double spread(const std::vector<double>& values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo <= 0.0) return *hi <= 0.0 ? 1.0 : kInf;
    return *hi / *lo;
}

}  // namespace

CalibrationResult calibrate_theorem1(std::span<const ProblemSpec> cases, std::span<const Profile> solutions) {
    if (cases.empty()) throw Error(ErrorCode::EmptySweep, "no calibration cases");
    if (cases.size() != solutions.size())
        throw Error(ErrorCode::InvalidConfig, "one solution profile is needed per case");

    CalibrationResult result;
    result.variant = cases.front().variant;
    std::map<double, std::vector<std::vector<RatioSample>>> by_level;

    for (std::size_t c = 0; c < cases.size(); ++c) {
        const ProblemSpec& spec = validate_spec(cases[c]);
        if (spec.variant != result.variant)
            throw Error(ErrorCode::MixedVariants, "calibration cases must share one variant");
        if (spec.k == 0.0) continue;
        const Profile& u = solutions[c];
        require_grid_matches(spec, u.grid());

        std::vector<RatioSample> samples;
        samples.reserve(u.size());
        CalibrationCase entry{spec, 0.0};
        const double nonlinear = std::pow(spec.k, spec.q - 2.0) * spec.d * spec.d;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double rho = std::pow(spec.d / u.grid()[i], spec.n - 2.0);
            const double ratio = u[i] / (spec.k * rho);
            entry.max_ratio = std::max(entry.max_ratio, ratio);
            samples.push_back({ratio, nonlinear});
        }
        result.cases.push_back(entry);
        by_level[spec.d].push_back(std::move(samples));
    }
    if (result.cases.empty()) throw Error(ErrorCode::EmptySweep, "every calibration case has k = 0");

    std::vector<std::vector<RatioSample>> everything;
    std::vector<double> cs, c1s, c2s;
    for (auto& [d, groups] : by_level) {
        const Fit fit = fit_constants(result.variant, groups);
        result.levels.push_back({d, fit.c, fit.c1, fit.c2});
        cs.push_back(fit.c);
        c1s.push_back(fit.c1);
        c2s.push_back(fit.c2);
        everything.insert(everything.end(), groups.begin(), groups.end());
    }
    const Fit overall = fit_constants(result.variant, everything);
    result.c = overall.c;
    result.c1 = overall.c1;
    result.c2 = overall.c2;
    result.stability = result.variant == Variant::Absorption ? std::max(spread(c1s), spread(c2s)) : spread(cs);
    return result;
}

}  // namespace emden
