#pragma once

// Embedded Dormand-Prince 5(4) integrator with standard step-size control.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace emden {

template <std::size_t N>
class DormandPrince {
public:
    using State = std::array<double, N>;

    struct Options {
        double rtol = 1e-11;
        double atol = 1e-11;
        double h_min = 1e-14;
        std::size_t max_steps = 1'000'000;
        /// Abort with Diverged once any component exceeds this magnitude.
        double blowup = 1e8;
    };

    enum class Status { Ok, StepUnderflow, TooManySteps, Diverged };

    explicit DormandPrince(Options options) : opt_(options) {}

    /// Integrate y from t to t_end (t_end > t). On return t, y hold the last
    /// accepted point and h the step size suggested for the next call.
    template <class Rhs>
    Status advance(const Rhs& rhs, double& t, State& y, double t_end, double& h) {
        if (h <= 0.0) h = (t_end - t) * 1e-3;
        State k1 = rhs(t, y);
        for (std::size_t step = 0; step < opt_.max_steps; ++step) {
            if (t >= t_end) return Status::Ok;
            bool last = false;
            const double h_proposed = h;
            if (t + h >= t_end) {
                h = t_end - t;
                last = true;
            }
            State k2, k3, k4, k5, k6, k7, y5, tmp;
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
            k2 = rhs(t + c2 * h, tmp);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = rhs(t + c3 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs(t + c4 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs(t + c5 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = rhs(t + h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = rhs(t + h, y5);

            double err = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < N; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                      e7 * k7[i]);
                const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(e) / sc);
                finite = finite && std::isfinite(y5[i]);
            }
            if (!finite) err = 1e10;

            if (err <= 1.0) {
                t = last ? t_end : t + h;
                y = y5;
                k1 = k7;  // FSAL
                for (double v : y)
                    if (std::abs(v) > opt_.blowup) return Status::Diverged;
                const double fac = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                if (last) {
                    h = std::max(h_proposed, h * fac);
                    return Status::Ok;
                }
                h *= fac;
            } else {
                h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
                if (h < opt_.h_min) return Status::StepUnderflow;
            }
        }
        return Status::TooManySteps;
    }

private:
    Options opt_;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // Difference between the 5th- and 4th-order weights.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace emden
