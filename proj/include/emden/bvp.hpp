#pragma once

// Numerical solvers for the radial boundary value problem
//
//     u'' + (n-1)/r u' = sigma |u|^{q-1} u,   u(d) = k,  u(1) = 0.
//
// shoot() and solve_fd() are independent: the first integrates an initial
// value problem and root-finds on the outer boundary value, the second solves
// a finite-volume discretization by Newton's method. Agreement between them is
// the working evidence that the computed solution is the solution.

#include "emden/green.hpp"
#include "emden/problem.hpp"

#include <optional>
#include <utility>

namespace emden {

struct SolveFlags {
    bool went_negative = false;
    bool exceeded_k = false;

    bool operator==(const SolveFlags&) const = default;
};

struct SolveReport {
    Profile profile;
    /// |u(1)| for shooting; zero for the finite-difference solver.
    double boundary_mismatch = 0.0;
    /// residual_norm(profile, spec).
    double residual_norm = 0.0;
    int iterations = 0;
    SolveFlags flags;
    /// u'(d) of the returned solution (shooting) or its one-sided estimate.
    double slope = 0.0;
};

/// Flags derived from the profile: min < -1e-8 max(1,k), max > k(1 + 1e-8).
SolveFlags classify_profile(const Profile& u, const ProblemSpec& spec);

/// u'' from the radial ODE, using the odd extension |u|^{q-1} u.
double radial_rhs(double r, double u, double du, const ProblemSpec& spec);

struct ShootingConfig {
    /// Relative and absolute (scaled by max(1,k)) integrator tolerance.
    double tolerance = 1e-12;
    int max_iterations = 200;
    /// Initial slope bracket for u'(d); defaults to [-10 S, 0] (absorption,
    /// Laplace) or [-S, 0] (source), S the magnitude of the harmonic slope at d.
    std::optional<std::pair<double, double>> bracket;
    int scan_samples = 64;
    int max_expansions = 8;
};

/// Throws Error(NoConvergence) if no bracket is found or bisection stalls.
SolveReport shoot(const ProblemSpec& spec, const RadialGrid& grid, const ShootingConfig& config = {});

struct NewtonConfig {
    int max_iterations = 50;
    /// Both thresholds are scaled by max(1, k).
    double update_tolerance = 1e-12;
    double residual_tolerance = 1e-10;
    int max_halvings = 20;
};

/// Throws Error(NoConvergence) or Error(SingularJacobian).
SolveReport solve_fd(const ProblemSpec& spec, const RadialGrid& grid, const NewtonConfig& config = {});

/// Central-difference residual u'' + (n-1)/r u' - sigma |u|^{q-1} u at interior
/// nodes; the two boundary entries are zero.
Profile residual_profile(const Profile& u, const ProblemSpec& spec);

/// Sup-norm of residual_profile.
double residual_norm(const Profile& u, const ProblemSpec& spec);

/// Same differences against a prescribed right-hand side: u'' + (n-1)/r u' - f.
Profile residual_profile(const Profile& u, const ProblemSpec& spec, const SourceTerm& f);
double residual_norm(const Profile& u, const ProblemSpec& spec, const SourceTerm& f);

/// Sup over interior nodes of |u''| + |(n-1)/r u'| + |u|^q with the same
/// differences; the natural size against which residual_norm is judged.
double operator_scale(const Profile& u, const ProblemSpec& spec);

}  // namespace emden
