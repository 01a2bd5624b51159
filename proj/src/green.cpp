#include "emden/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace emden {

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule by Newton iteration on P_count.
GaussRule gauss_legendre(int count) {
    GaussRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    for (int i = 0; i < count; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= count; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

// Contribution of int tau^power f(tau) dtau over each grid interval, with f
// replaced by its local interpolant. The integrand is then a polynomial of
// degree power + 2 at most, which the Gauss rule integrates exactly.
std::vector<double> interval_moments(const RadialGrid& grid, std::span<const double> f,
                                     int power, QuadratureRule rule) {
    const std::size_t m = grid.size();
    const int degree = rule == QuadratureRule::Simpson ? 2 : 1;
    const GaussRule gauss = gauss_legendre((power + degree) / 2 + 1);

    std::vector<double> out(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = grid[i], b = grid[i + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        // Three-node stencil covering [a, b]; shifted left at the last interval.
        const std::size_t s = std::min(i, m - 3);
        const double x0 = grid[s], x1 = grid[s + 1], x2 = grid[s + 2];
        double sum = 0.0;
        for (std::size_t g = 0; g < gauss.nodes.size(); ++g) {
            const double t = mid + half * gauss.nodes[g];
            double ft;
            if (degree == 1) {
                const double lam = (t - a) / (b - a);
                ft = (1.0 - lam) * f[i] + lam * f[i + 1];
            } else {
                ft = f[s] * (t - x1) * (t - x2) / ((x0 - x1) * (x0 - x2)) +
                     f[s + 1] * (t - x0) * (t - x2) / ((x1 - x0) * (x1 - x2)) +
                     f[s + 2] * (t - x0) * (t - x1) / ((x2 - x0) * (x2 - x1));
            }
            sum += gauss.weights[g] * std::pow(t, power) * ft;
        }
        out[i] = half * sum;
    }
    return out;
}

// Tail sums: result[i] = sum_{j >= i} pieces[j], result[m-1] = 0.
std::vector<double> cumulative_from_outer(const std::vector<double>& pieces) {
    std::vector<double> acc(pieces.size() + 1, 0.0);
    for (std::size_t i = pieces.size(); i-- > 0;) acc[i] = acc[i + 1] + pieces[i];
    return acc;
}

void check_source(const SourceTerm& f, const ProblemSpec& spec) {
    validate_spec(spec);
    require_grid_matches(spec, f.grid());
}

}  // namespace

RadialGrid make_grid(const ProblemSpec& spec, std::size_t m, Grading grading) {
    validate_spec(spec);
    if (m < RadialGrid::kMinNodes)
        throw Error(ErrorCode::TooFewNodes, "requested " + std::to_string(m) + " nodes, need at least 8");
    const double d = spec.d;
    std::vector<double> nodes(m);
    const double last = double(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        if (grading == Grading::Uniform)
            nodes[i] = d + (1.0 - d) * (double(i) / last);
        else
            nodes[i] = d * std::pow(1.0 / d, double(i) / last);
    }
    nodes.front() = d;
    nodes.back() = 1.0;
    return RadialGrid(std::move(nodes), grading);
}

RadialGrid make_grid(const ProblemSpec& spec, const QuadratureConfig& config) {
    return make_grid(spec, config.nodes, config.grading);
}

Profile inner_moment(const SourceTerm& f, const ProblemSpec& spec, QuadratureRule rule) {
    check_source(f, spec);
    const auto pieces = interval_moments(f.grid(), f.samples().values(), spec.n - 1, rule);
    return Profile(f.grid(), cumulative_from_outer(pieces));
}

GreenSolution solve_green(const SourceTerm& f, const ProblemSpec& spec, QuadratureRule rule) {
    check_source(f, spec);
    const RadialGrid& grid = f.grid();
    const int n = spec.n;
    const auto values = f.samples().values();

    // Swapping the order of integration turns the double integral into
    //   W(x) = (x^{2-n} A(x) - B(x)) / (n-2),
    // A(x) = int_x^1 tau^{n-1} f, B(x) = int_x^1 tau f.
    const auto a = cumulative_from_outer(interval_moments(grid, values, n - 1, rule));
    const auto b = cumulative_from_outer(interval_moments(grid, values, 1, rule));

    const std::size_t m = grid.size();
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i)
        w[i] = (std::pow(grid[i], 2.0 - n) * a[i] - b[i]) / (n - 2.0);
    const double big_d = w.front();

    ProblemSpec unit = spec;
    unit.k = 1.0;
    for (std::size_t i = 0; i < m; ++i) w[i] += (spec.k - big_d) * harmonic_value(unit, grid[i]);
    return {Profile(grid, std::move(w)), big_d};
}

Profile picard_map(const Profile& u, const ProblemSpec& spec, QuadratureRule rule) {
    validate_spec(spec);
    if (spec.variant == Variant::Laplace)
        throw Error(ErrorCode::VariantMismatch, "the Picard map needs a nonlinear variant");
    const double sign = source_sign(spec.variant);
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u[i];
        if (v < -kNegativeClamp)
            throw Error(ErrorCode::NegativeInput,
                        "trial profile is negative (" + std::to_string(v) + ") at r = " +
                            std::to_string(u.grid()[i]));
        f[i] = sign * std::pow(std::max(v, 0.0), spec.q);
    }
    return apply_green(SourceTerm(Profile(u.grid(), std::move(f))), spec, rule);
}

}  // namespace emden
