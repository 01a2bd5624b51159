#pragma once

// Problem definition for the radial Dirichlet problem on the annulus d < r < 1:
//
//     u'' + (n-1)/r u' = sigma |u|^{q-1} u,   u(d) = k,  u(1) = 0,
//
// with sigma = +1 (absorption), -1 (source) or 0 (Laplace).

#include "emden/error.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emden {

enum class Variant { Absorption, Source, Laplace };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

/// Sign of the nonlinear term on the right-hand side of the radial ODE.
constexpr double source_sign(Variant v) {
    switch (v) {
    case Variant::Absorption: return 1.0;
    case Variant::Source: return -1.0;
    case Variant::Laplace: return 0.0;
    }
    return 0.0;
}

struct ProblemSpec {
    int n = 3;
    double q = 2.0;
    double d = 0.5;
    double k = 1.0;
    Variant variant = Variant::Absorption;

    /// Upper end of the admissible exponent range, (n+2)/(n-2).
    double critical_exponent() const { return double(n + 2) / double(n - 2); }

    bool operator==(const ProblemSpec&) const = default;
};

/// Throws Error if any of n > 2, 1 < q < (n+2)/(n-2) (nonlinear variants),
/// 0 < d < 1, k >= 0 fails. Returns the spec unchanged otherwise.
const ProblemSpec& validate_spec(const ProblemSpec& spec);

enum class Grading { Uniform, Geometric };

std::string_view to_string(Grading g);
std::optional<Grading> parse_grading(std::string_view text);

/// Strictly increasing node set on [d, 1] with exact endpoints.
class RadialGrid {
public:
    static constexpr std::size_t kMinNodes = 8;

    RadialGrid(std::vector<double> nodes, Grading grading);

    std::span<const double> nodes() const { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    std::size_t size() const { return nodes_.size(); }
    Grading grading() const { return grading_; }
    double inner() const { return nodes_.front(); }
    double outer() const { return nodes_.back(); }

    /// Index i with nodes[i] <= x <= nodes[i+1]; x is clamped into [d, 1].
    std::size_t locate(double x) const;

    bool operator==(const RadialGrid& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
    Grading grading_;
};

/// Sampled radial function. Between nodes it is read by linear interpolation.
class Profile {
public:
    Profile(RadialGrid grid, std::vector<double> values);

    /// Constant profile.
    static Profile constant(const RadialGrid& grid, double value);

    const RadialGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double at(double x) const;
    double min() const;
    double max() const;

private:
    RadialGrid grid_;
    std::vector<double> values_;
};

/// Sup-norm of the pointwise difference; throws GridMismatch on differing grids.
double sup_distance(const Profile& a, const Profile& b);

/// Throws GridMismatch unless the grid's inner node is exactly spec.d.
void require_grid_matches(const ProblemSpec& spec, const RadialGrid& grid);

/// Constants of the quadratic-source profile C1 x^{2-n} + C2 x^2 + C3.
struct CoefficientSet {
    double c_tilde1 = 0.0;
    double c_tilde2 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double d0 = 0.0;
    /// Claimed small-d leading term of c1, (k -/+ k^q/(n(n-2))) / (d^{2-n} - 1).
    double principal = 0.0;
};

/// k (x^{2-n} - 1) / (d^{2-n} - 1): the radial harmonic with the problem's
/// boundary data, and the upper (absorption) / lower (source) bound.
double harmonic_value(const ProblemSpec& spec, double x);
Profile harmonic_profile(const ProblemSpec& spec, const RadialGrid& grid);

/// D0 = int_d^1 t^{1-n} int_t^1 tau^{n-1} k^q dtau dt in closed form.
/// For the source variant k^q enters with a negative sign.
double d0_constant(const ProblemSpec& spec);

CoefficientSet theorem2_coefficients(const ProblemSpec& spec);

double quadratic_source_value(const CoefficientSet& c, int n, double x);
Profile quadratic_source_profile(const ProblemSpec& spec, const RadialGrid& grid);

}  // namespace emden
