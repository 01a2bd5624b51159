#include "emden/bvp.hpp"

#include "emden/rk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace emden {

namespace {

double odd_power(double u, double q) { return std::pow(std::abs(u), q - 1.0) * u; }

double scale_of(const ProblemSpec& spec) { return std::max(1.0, spec.k); }

}  // namespace

SolveFlags classify_profile(const Profile& u, const ProblemSpec& spec) {
    SolveFlags flags;
    flags.went_negative = u.min() < -1e-8 * scale_of(spec);
    flags.exceeded_k = u.max() > spec.k * (1.0 + 1e-8);
    return flags;
}

double radial_rhs(double r, double u, double du, const ProblemSpec& spec) {
    const double sigma = source_sign(spec.variant);
    const double source = sigma == 0.0 ? 0.0 : sigma * odd_power(u, spec.q);
    return source - (spec.n - 1.0) / r * du;
}

namespace {

struct DifferenceTerms {
    double second, first, source;
};

// Second-order differences on a nonuniform three-point stencil.
template <class Visit>
void visit_differences(const Profile& u, const ProblemSpec& spec, Visit&& visit) {
    validate_spec(spec);
    const RadialGrid& grid = u.grid();
    require_grid_matches(spec, grid);
    const double sigma = source_sign(spec.variant);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double hm = grid[i] - grid[i - 1];
        const double hp = grid[i + 1] - grid[i];
        const double denom = hm * hp * (hm + hp);
        const double d2 = 2.0 * (hm * u[i + 1] - (hm + hp) * u[i] + hp * u[i - 1]) / denom;
        const double d1 = (hm * hm * u[i + 1] + (hp * hp - hm * hm) * u[i] - hp * hp * u[i - 1]) / denom;
        const double source = sigma == 0.0 ? 0.0 : sigma * odd_power(u[i], spec.q);
        visit(i, DifferenceTerms{d2, (spec.n - 1.0) / grid[i] * d1, source});
    }
}

}  // namespace

Profile residual_profile(const Profile& u, const ProblemSpec& spec) {
    std::vector<double> res(u.size(), 0.0);
    visit_differences(u, spec, [&](std::size_t i, const DifferenceTerms& t) {
        res[i] = t.second + t.first - t.source;
    });
    return Profile(u.grid(), std::move(res));
}

Profile residual_profile(const Profile& u, const ProblemSpec& spec, const SourceTerm& f) {
    if (!(f.grid() == u.grid())) throw Error(ErrorCode::GridMismatch, "source term is not on the profile grid");
    std::vector<double> res(u.size(), 0.0);
    visit_differences(u, spec, [&](std::size_t i, const DifferenceTerms& t) {
        res[i] = t.second + t.first - f.samples()[i];
    });
    return Profile(u.grid(), std::move(res));
}

double residual_norm(const Profile& u, const ProblemSpec& spec, const SourceTerm& f) {
    double worst = 0.0;
    for (double r : residual_profile(u, spec, f).values()) worst = std::max(worst, std::abs(r));
    return worst;
}

double operator_scale(const Profile& u, const ProblemSpec& spec) {
    double scale = 0.0;
    visit_differences(u, spec, [&](std::size_t, const DifferenceTerms& t) {
        scale = std::max(scale, std::abs(t.second) + std::abs(t.first) + std::abs(t.source));
    });
    return scale;
}

double residual_norm(const Profile& u, const ProblemSpec& spec) {
    const Profile res = residual_profile(u, spec);
    double worst = 0.0;
    for (double r : res.values()) worst = std::max(worst, std::abs(r));
    return worst;
}

// ---------------------------------------------------------------------------
// Shooting

namespace {

struct Shot {
    double end_value;           // u(1), or +-inf when the trajectory blew up
    std::vector<double> values; // u at the grid nodes; empty unless the shot finished
};

Shot integrate_shot(const ProblemSpec& spec, const RadialGrid& grid, double slope, double tolerance) {
    using Integrator = DormandPrince<2>;
    Integrator::Options opt;
    opt.rtol = tolerance;
    opt.atol = tolerance * scale_of(spec);
    opt.blowup = 1e8 * scale_of(spec);
    Integrator rk(opt);

    auto rhs = [&spec](double r, const Integrator::State& y) -> Integrator::State {
        return {y[1], radial_rhs(r, y[0], y[1], spec)};
    };

    Integrator::State y{spec.k, slope};
    double r = grid.inner();
    double h = 0.0;
    Shot shot;
    shot.values.reserve(grid.size());
    shot.values.push_back(spec.k);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto status = rk.advance(rhs, r, y, grid[i], h);
        if (status != Integrator::Status::Ok) {
            shot.end_value = y[0] >= 0.0 ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
            shot.values.clear();
            return shot;
        }
        shot.values.push_back(y[0]);
    }
    shot.end_value = y[0];
    return shot;
}

bool opposite_signs(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }

}  // namespace

SolveReport shoot(const ProblemSpec& spec, const RadialGrid& grid, const ShootingConfig& config) {
    validate_spec(spec);
    require_grid_matches(spec, grid);
    if (!(config.tolerance > 0.0))
        throw Error(ErrorCode::InvalidConfig, "shooting tolerance must be positive");

    if (spec.k == 0.0) {
        Profile zero = Profile::constant(grid, 0.0);
        return {zero, 0.0, residual_norm(zero, spec), 0, {}, 0.0};
    }

    const int n = spec.n;
    const double harmonic_slope =
        spec.k * (n - 2.0) * std::pow(spec.d, 1.0 - n) / (std::pow(spec.d, 2.0 - n) - 1.0);
    // Source solutions are flatter at d than the harmonic, absorption ones steeper.
    double lo = spec.variant == Variant::Source ? -harmonic_slope : -10.0 * harmonic_slope;
    double hi = 0.0;
    if (config.bracket) {
        lo = std::min(config.bracket->first, config.bracket->second);
        hi = std::max(config.bracket->first, config.bracket->second);
        if (lo == hi) throw Error(ErrorCode::InvalidConfig, "slope bracket endpoints must differ");
    }

    auto mismatch = [&](double s) { return integrate_shot(spec, grid, s, config.tolerance).end_value; };

    // Scan upward from the steep end; the first sign change is taken.
    bool bracketed = false;
    double f_lo = 0.0, f_hi = 0.0;
    int evaluations = 0;
    const int samples = std::max(config.scan_samples, 2);
    for (int attempt = 0; attempt <= config.max_expansions && !bracketed; ++attempt) {
        double s_prev = lo, f_prev = mismatch(lo);
        ++evaluations;
        for (int j = 1; j < samples; ++j) {
            const double s = lo + (hi - lo) * double(j) / double(samples - 1);
            const double f = mismatch(s);
            ++evaluations;
            if (opposite_signs(f_prev, f)) {
                lo = s_prev, f_lo = f_prev;
                hi = s, f_hi = f;
                bracketed = true;
                break;
            }
            s_prev = s, f_prev = f;
        }
        if (!bracketed) {
            const double width = hi - lo;
            lo -= width;
            hi += width;
        }
    }
    if (!bracketed) {
        std::ostringstream os;
        os << "no sign change of u(1) over slopes [" << lo << ", " << hi << "] after "
           << config.max_expansions << " expansions";
        throw Error(ErrorCode::NoConvergence, os.str());
    }

    int iterations = 0;
    while (f_lo != 0.0 && f_hi != 0.0 && iterations < config.max_iterations) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = mismatch(mid);
        ++iterations;
        if (opposite_signs(f_lo, f_mid)) {
            hi = mid, f_hi = f_mid;
        } else {
            lo = mid, f_lo = f_mid;
        }
    }

    const double slope = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
    Shot best = integrate_shot(spec, grid, slope, config.tolerance);
    const double allowed = 1e-8 * scale_of(spec);
    if (best.values.empty() || !(std::abs(best.end_value) <= allowed)) {
        std::ostringstream os;
        os << "bisection stopped after " << iterations << " iterations with u(1) = " << best.end_value;
        throw Error(ErrorCode::NoConvergence, os.str());
    }

    Profile profile(grid, std::move(best.values));
    SolveReport report{profile, std::abs(best.end_value), residual_norm(profile, spec), iterations,
                       classify_profile(profile, spec), slope};
    (void)evaluations;
    return report;
}

// ---------------------------------------------------------------------------
// Finite-volume Newton solver

namespace {

// Three-point flux-form discretization of (r^{n-1} u')' = r^{n-1} sigma |u|^{q-1} u.
// Face fluxes use the harmonic variable s = r^{2-n}/(2-n), so radial harmonics
// are reproduced exactly; cell faces sit at the s-midpoints.
struct FluxStencil {
    std::vector<double> left, right, volume;  // per node; boundary entries unused
};

FluxStencil build_stencil(const RadialGrid& grid, int n) {
    const std::size_t m = grid.size();
    const double p = 2.0 - n;
    std::vector<double> xp(m), face(m - 1);
    for (std::size_t i = 0; i < m; ++i) xp[i] = std::pow(grid[i], p);
    for (std::size_t i = 0; i + 1 < m; ++i) face[i] = std::pow(0.5 * (xp[i] + xp[i + 1]), 1.0 / p);

    FluxStencil st;
    st.left.assign(m, 0.0);
    st.right.assign(m, 0.0);
    st.volume.assign(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        st.left[i] = p / (xp[i] - xp[i - 1]);
        st.right[i] = p / (xp[i + 1] - xp[i]);
        st.volume[i] = (std::pow(face[i], n) - std::pow(face[i - 1], n)) / n;
    }
    return st;
}

// Residual in u units: the flux balance divided by the diagonal weight.
double scaled_residual(const FluxStencil& st, const std::vector<double>& u, const ProblemSpec& spec,
                       std::vector<double>* out) {
    const double sigma = source_sign(spec.variant);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double source = sigma == 0.0 ? 0.0 : sigma * odd_power(u[i], spec.q);
        const double r = st.right[i] * (u[i + 1] - u[i]) - st.left[i] * (u[i] - u[i - 1]) -
                         st.volume[i] * source;
        if (out) (*out)[i] = r;
        worst = std::max(worst, std::abs(r / (st.left[i] + st.right[i])));
    }
    return worst;
}

// Thomas algorithm for lower/diag/upper; solution overwrites rhs.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
                       std::vector<double>& rhs) {
    const std::size_t m = diag.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) {
            const double w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        const double scale = std::abs(lower[i]) + std::abs(upper[i]) + std::abs(diag[i]);
        if (!(std::abs(diag[i]) > 1e-14 * scale))
            throw Error(ErrorCode::SingularJacobian, "zero pivot in row " + std::to_string(i));
    }
    rhs[m - 1] /= diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

SolveReport solve_fd(const ProblemSpec& spec, const RadialGrid& grid, const NewtonConfig& config) {
    const Profile initial = harmonic_profile(spec, grid);
    const FluxStencil st = build_stencil(grid, spec.n);
    const std::size_t m = grid.size();
    const std::size_t interior = m - 2;
    const double scale = scale_of(spec);
    const double sigma = source_sign(spec.variant);

    std::vector<double> u(initial.values().begin(), initial.values().end());
    std::vector<double> res(m, 0.0), trial(m), trial_res(m, 0.0);
    double res_norm = scaled_residual(st, u, spec, &res);

    std::vector<double> lower(interior), diag(interior), upper(interior), delta(interior);
    int iterations = 0;
    bool converged = false;
    while (iterations < config.max_iterations) {
        ++iterations;
        for (std::size_t j = 0; j < interior; ++j) {
            const std::size_t i = j + 1;
            const double dsource = sigma == 0.0 ? 0.0 : sigma * spec.q * std::pow(std::abs(u[i]), spec.q - 1.0);
            lower[j] = j > 0 ? st.left[i] : 0.0;
            upper[j] = j + 1 < interior ? st.right[i] : 0.0;
            diag[j] = -(st.left[i] + st.right[i]) - st.volume[i] * dsource;
            delta[j] = -res[i];
        }
        solve_tridiagonal(lower, diag, upper, delta);

        double step = 1.0;
        double trial_norm = 0.0;
        for (int halving = 0; halving <= config.max_halvings; ++halving) {
            trial = u;
            for (std::size_t j = 0; j < interior; ++j) trial[j + 1] += step * delta[j];
            trial_norm = scaled_residual(st, trial, spec, &trial_res);
            if (trial_norm <= res_norm || halving == config.max_halvings) break;
            step *= 0.5;
        }
        double update = 0.0;
        for (std::size_t j = 0; j < interior; ++j) update = std::max(update, std::abs(step * delta[j]));
        u.swap(trial);
        res.swap(trial_res);
        res_norm = trial_norm;

        if (update < config.update_tolerance * scale && res_norm < config.residual_tolerance * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "Newton did not converge in " << config.max_iterations << " iterations (residual "
           << res_norm << ")";
        throw Error(ErrorCode::NoConvergence, os.str());
    }

    Profile profile(grid, std::move(u));
    const double slope = (profile[1] - profile[0]) / (grid[1] - grid[0]);
    return {profile, 0.0, residual_norm(profile, spec), iterations, classify_profile(profile, spec), slope};
}

}  // namespace emden
