#pragma once

// Explicit solution of the linear radial problem
//
//     w'' + (n-1)/x w' = f,   w(d) = k,  w(1) = 0,
//
// written as w(x) = W(x) + (k - D) h(x), with h the unit radial harmonic,
// W(x) = int_x^1 t^{1-n} int_t^1 tau^{n-1} f dtau dt and D = W(d).

#include "emden/problem.hpp"

#include <cstddef>

namespace emden {

enum class QuadratureRule {
    /// f replaced by its piecewise-linear interpolant.
    Trapezoid,
    /// f replaced by a piecewise-quadratic interpolant on three-node stencils.
    Simpson,
};

struct QuadratureConfig {
    QuadratureRule rule = QuadratureRule::Simpson;
    std::size_t nodes = 1025;
    Grading grading = Grading::Geometric;
};

/// Grid on [d, 1]. Geometric grading uses ratio (1/d)^{1/(m-1)} so nodes cluster at d.
RadialGrid make_grid(const ProblemSpec& spec, std::size_t m, Grading grading);
RadialGrid make_grid(const ProblemSpec& spec, const QuadratureConfig& config = {});

/// Right-hand side f sampled on the solution grid.
class SourceTerm {
public:
    explicit SourceTerm(Profile samples) : samples_(std::move(samples)) {}
    const Profile& samples() const { return samples_; }
    const RadialGrid& grid() const { return samples_.grid(); }

private:
    Profile samples_;
};

/// g(t) = int_t^1 tau^{n-1} f(tau) dtau at every node; g(1) = 0 exactly.
Profile inner_moment(const SourceTerm& f, const ProblemSpec& spec,
                     QuadratureRule rule = QuadratureRule::Simpson);

struct GreenSolution {
    Profile profile;
    /// The double integral evaluated at x = d.
    double d_constant;
};

GreenSolution solve_green(const SourceTerm& f, const ProblemSpec& spec,
                          QuadratureRule rule = QuadratureRule::Simpson);

inline Profile apply_green(const SourceTerm& f, const ProblemSpec& spec,
                           QuadratureRule rule = QuadratureRule::Simpson) {
    return solve_green(f, spec, rule).profile;
}

/// Values in [-kNegativeClamp, 0) are treated as zero by picard_map.
inline constexpr double kNegativeClamp = 1e-12;

/// u -> G[+u^q] (absorption) or G[-u^q] (source). u must be nonnegative.
Profile picard_map(const Profile& u, const ProblemSpec& spec,
                   QuadratureRule rule = QuadratureRule::Simpson);

}  // namespace emden
