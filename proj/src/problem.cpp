#include "emden/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emden {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::RadiusOutOfRange: return "RadiusOutOfRange";
    case ErrorCode::NegativeBoundaryValue: return "NegativeBoundaryValue";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::EmptySweep: return "EmptySweep";
    case ErrorCode::MixedVariants: return "MixedVariants";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::Absorption: return "absorption";
    case Variant::Source: return "source";
    case Variant::Laplace: return "laplace";
    }
    return "unknown";
}

std::optional<Variant> parse_variant(std::string_view text) {
    if (text == "absorption") return Variant::Absorption;
    if (text == "source") return Variant::Source;
    if (text == "laplace") return Variant::Laplace;
    return std::nullopt;
}

std::string_view to_string(Grading g) {
    return g == Grading::Uniform ? "uniform" : "geometric";
}

std::optional<Grading> parse_grading(std::string_view text) {
    if (text == "uniform") return Grading::Uniform;
    if (text == "geometric") return Grading::Geometric;
    return std::nullopt;
}

const ProblemSpec& validate_spec(const ProblemSpec& spec) {
    auto fail = [](ErrorCode code, auto... parts) {
        std::ostringstream os;
        (os << ... << parts);
        throw Error(code, os.str());
    };
    if (spec.n <= 2) fail(ErrorCode::DimensionTooSmall, "n = ", spec.n, " must exceed 2");
    if (spec.variant != Variant::Laplace) {
        const double qmax = spec.critical_exponent();
        if (!(spec.q > 1.0 && spec.q < qmax))
            fail(ErrorCode::ExponentOutOfRange, "q = ", spec.q, " outside (1, ", qmax, ")");
    }
    if (!(spec.d > 0.0 && spec.d < 1.0))
        fail(ErrorCode::RadiusOutOfRange, "d = ", spec.d, " outside (0, 1)");
    if (!(spec.k >= 0.0) || !std::isfinite(spec.k))
        fail(ErrorCode::NegativeBoundaryValue, "k = ", spec.k, " must be finite and >= 0");
    return spec;
}

// ---------------------------------------------------------------------------

RadialGrid::RadialGrid(std::vector<double> nodes, Grading grading)
    : nodes_(std::move(nodes)), grading_(grading) {
    if (nodes_.size() < kMinNodes)
        throw Error(ErrorCode::TooFewNodes,
                    "grid has " + std::to_string(nodes_.size()) + " nodes, need at least 8");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i]))
            throw Error(ErrorCode::InvalidGrid, "non-finite node");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
            throw Error(ErrorCode::InvalidGrid, "nodes must be strictly increasing");
    }
    if (nodes_.front() <= 0.0 || nodes_.back() != 1.0)
        throw Error(ErrorCode::InvalidGrid, "grid must span [d, 1] with 0 < d");
}

std::size_t RadialGrid::locate(double x) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    if (it == nodes_.begin()) return 0;
    const auto idx = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(idx, nodes_.size() - 2);
}

Profile::Profile(RadialGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw Error(ErrorCode::GridMismatch, "profile length differs from grid size");
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "profile value is not finite");
}

Profile Profile::constant(const RadialGrid& grid, double value) {
    return Profile(grid, std::vector<double>(grid.size(), value));
}

double Profile::at(double x) const {
    const std::size_t i = grid_.locate(x);
    const double x0 = grid_[i], x1 = grid_[i + 1];
    const double t = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
    return (1.0 - t) * values_[i] + t * values_[i + 1];
}

double Profile::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Profile::max() const { return *std::max_element(values_.begin(), values_.end()); }

double sup_distance(const Profile& a, const Profile& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "profiles live on different grids");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

void require_grid_matches(const ProblemSpec& spec, const RadialGrid& grid) {
    if (grid.inner() != spec.d)
        throw Error(ErrorCode::GridMismatch, "grid starts at " + std::to_string(grid.inner()) +
                                                 " but the inner radius is " + std::to_string(spec.d));
}

// ---------------------------------------------------------------------------

double harmonic_value(const ProblemSpec& spec, double x) {
    const double p = 2.0 - spec.n;
    return spec.k * (std::pow(x, p) - 1.0) / (std::pow(spec.d, p) - 1.0);
}

Profile harmonic_profile(const ProblemSpec& spec, const RadialGrid& grid) {
    validate_spec(spec);
    require_grid_matches(spec, grid);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = harmonic_value(spec, grid[i]);
    return Profile(grid, std::move(v));
}

namespace {

void require_nonlinear(const ProblemSpec& spec, const char* what) {
    if (spec.variant == Variant::Laplace)
        throw Error(ErrorCode::VariantMismatch, std::string(what) + " is undefined for the Laplace variant");
}

double signed_kq(const ProblemSpec& spec) {
    return source_sign(spec.variant) * std::pow(spec.k, spec.q);
}

}  // namespace

double d0_constant(const ProblemSpec& spec) {
    validate_spec(spec);
    require_nonlinear(spec, "D0");
    const int n = spec.n;
    const double d = spec.d;
    return signed_kq(spec) / (2.0 * n * (n - 2)) *
           (2.0 * std::pow(d, 2.0 - n) + (n - 2) * d * d - n);
}

CoefficientSet theorem2_coefficients(const ProblemSpec& spec) {
    validate_spec(spec);
    require_nonlinear(spec, "Quadratic-source coefficients");
    const int n = spec.n;
    const double kq = signed_kq(spec);
    const double denom = std::pow(spec.d, 2.0 - n) - 1.0;

    CoefficientSet c;
    c.d0 = d0_constant(spec);
    c.c_tilde1 = kq / (2.0 * n * (n - 2));
    c.c_tilde2 = -(spec.k - c.d0) / denom;
    c.c1 = 2.0 * c.c_tilde1 - c.c_tilde2;
    c.c2 = c.c_tilde1 * (n - 2);
    c.c3 = c.c_tilde2 - n * c.c_tilde1;
    // Absorption: (k - k^q/(n(n-2))); source: (k + k^q/(n(n-2))).
    c.principal = (spec.k - kq / (n * (n - 2.0))) / denom;
    return c;
}

double quadratic_source_value(const CoefficientSet& c, int n, double x) {
    return c.c1 * std::pow(x, 2.0 - n) + c.c2 * x * x + c.c3;
}

Profile quadratic_source_profile(const ProblemSpec& spec, const RadialGrid& grid) {
    const CoefficientSet c = theorem2_coefficients(spec);
    require_grid_matches(spec, grid);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = quadratic_source_value(c, spec.n, grid[i]);
    return Profile(grid, std::move(v));
}

}  // namespace emden
