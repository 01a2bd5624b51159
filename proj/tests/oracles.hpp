#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's quadrature or solvers.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// int_x^1 t^{1-n} int_t^1 tau^{n-1} f(tau) dtau dt by nested adaptive quadrature.
inline double green_double_integral(const std::function<double(double)>& f, int n, double x, double tol = 1e-11) {
    auto inner = [&](double t) {
        return std::pow(t, 1.0 - n) *
               integrate([&](double tau) { return std::pow(tau, n - 1.0) * f(tau); }, t, 1.0, 0.01 * tol);
    };
    return integrate(inner, x, 1.0, tol);
}

/// Solution of w'' + (n-1)/x w' = f, w(d) = k, w(1) = 0 from the double integral.
inline double green_solution(const std::function<double(double)>& f, int n, double d, double k, double x) {
    const double big_d = green_double_integral(f, n, d);
    const double h = (std::pow(x, 2.0 - n) - 1.0) / (std::pow(d, 2.0 - n) - 1.0);
    return green_double_integral(f, n, x) + (k - big_d) * h;
}

/// Observed convergence order from errors at successive halvings.
inline double observed_order(double coarse_error, double fine_error) {
    return std::log2(coarse_error / fine_error);
}

}  // namespace oracle
