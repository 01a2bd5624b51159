#pragma once

// Upper and lower bounds for the radial solution built by the comparison
// method: the Green map G[sigma u^q] reverses order for absorption and
// preserves it for the source variant, so iterating it from known bounds
// produces new bounds.

#include "emden/green.hpp"
#include "emden/problem.hpp"

#include <span>
#include <string>
#include <vector>

namespace emden {

struct Bound {
    std::string label;
    Profile profile;
    /// Valid only for solutions bounded above by k.
    bool conditional = false;
};

struct BoundSet {
    std::vector<Bound> lowers;
    std::vector<Bound> uppers;
};

/// Smallest (upper - lower) over all nodes and lower/upper pairs. Conditional
/// bounds are skipped unless include_conditional is set. +inf when a side is empty.
double ordering_margin(const BoundSet& bounds, bool include_conditional = true);

/// Per-step change of consecutive ladder profiles; a ladder is nested when
/// lowers never decrease and uppers never increase (within tolerance).
struct NestingReport {
    std::vector<double> lower_min_increase;  // min over nodes of lower[j+1] - lower[j]
    std::vector<double> upper_min_decrease;  // min over nodes of upper[j] - upper[j+1]
    bool nested = true;
};

NestingReport measure_nesting(const BoundSet& ladder, double tolerance);

/// Applies the Picard map `steps` times.
///
/// Absorption alternates from the zero lower bound: the first step gives the
/// harmonic upper bound ("Eq23"), even steps give lowers G[min(upper, k)^q]
/// clamped at zero, odd steps give uppers G[lower^q].
///
/// Source runs two monotone chains, lowers from 0 and (conditional) uppers
/// from k; step one yields the harmonic lower ("Eq23") and the primed
/// quadratic upper ("Eq25p").
BoundSet bound_ladder(const ProblemSpec& spec, const RadialGrid& grid, int steps,
                      QuadratureRule rule = QuadratureRule::Simpson);

/// Absorption: upper "Eq23" (harmonic), lower "Eq25" (quadratic source profile).
/// Source: lower "Eq23", conditional upper "Eq25p" (k^q negated).
BoundSet closed_form_bounds(const ProblemSpec& spec, const RadialGrid& grid);

// ---------------------------------------------------------------------------
// Empirical constants for bounds of the form  u(x) <= C k (d/x)^{n-2}  and
// u(x) <= (c1 k + c2 k^{q-1} d^2) (d/x)^{n-2}.

struct CalibrationCase {
    ProblemSpec spec;
    /// max over nodes of u / (k (d/x)^{n-2}).
    double max_ratio = 0.0;
};

struct LevelFit {
    double d = 0.0;
    double c = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

struct CalibrationResult {
    Variant variant = Variant::Laplace;
    /// Laplace and source variants.
    double c = 0.0;
    /// Absorption variant.
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<CalibrationCase> cases;
    /// Constants refitted on the cases of each distinct d, ascending in d.
    std::vector<LevelFit> levels;
    /// Largest max/min ratio of a fitted constant across the d levels.
    double stability = 1.0;
};

/// Cases with k = 0 carry no information and are skipped.
/// Throws EmptySweep, MixedVariants or GridMismatch.
CalibrationResult calibrate_theorem1(std::span<const ProblemSpec> cases, std::span<const Profile> solutions);

}  // namespace emden
