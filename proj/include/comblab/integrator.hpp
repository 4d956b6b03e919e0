#pragma once

// Adaptive Dormand-Prince 5(4) integration of an autonomous scalar ODE.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace comblab {

struct FlowConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.05;
    /// Budget of attempted steps per unit of integration time.
    long max_substeps = 10000;

    void validate() const
    {
        if (!(abs_tol > 0.0 && abs_tol <= 1e-6) || !(rel_tol > 0.0 && rel_tol <= 1e-6)) {
            throw std::invalid_argument("FlowConfig: tolerances must lie in (0, 1e-6]");
        }
        if (!(max_step > 0.0 && max_step <= 0.1)) {
            throw std::invalid_argument("FlowConfig: max_step must lie in (0, 0.1]");
        }
        if (max_substeps < 100) {
            throw std::invalid_argument("FlowConfig: max_substeps must be >= 100");
        }
    }
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
};

/// Integrates dy/dt = rhs(y) from y0 over time t (either sign).
template <class Rhs>
double integrate_scalar(Rhs&& rhs, double y0, double t, const FlowConfig& cfg,
                        IntegrationStats* stats = nullptr)
{
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    // The field is only Lipschitz where the nearest comb piece changes, and
    // there the embedded estimate is optimistic. Steps are held to a local
    // error well below the tolerances so the global error stays within them.
    constexpr double local_fraction = 1e-3;

    if (t == 0.0) {
        return y0;
    }
    const double dir = t > 0.0 ? 1.0 : -1.0;
    const double span = std::abs(t);
    const double budget = static_cast<double>(cfg.max_substeps) * std::max(1.0, span);

    double y = y0;
    double done = 0.0;
    double h = std::min(cfg.max_step, span);
    double k1 = rhs(y);
    long attempts = 0;
    IntegrationStats local;

    while (done < span) {
        if (++attempts > budget) {
            throw IntegrationFailure("integrate_scalar: step budget exhausted at t=" +
                                     std::to_string(dir * done));
        }
        const bool last = done + h >= span;
        const double step = last ? span - done : h;
        const double hs = dir * step;

        const double k2 = rhs(y + hs * a21 * k1);
        const double k3 = rhs(y + hs * (a31 * k1 + a32 * k2));
        const double k4 = rhs(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = rhs(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = rhs(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = rhs(y_new);

        const double err_abs =
            std::abs(hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double scale =
            local_fraction * (cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y), std::abs(y_new)));
        const double err = err_abs / scale;

        if (!std::isfinite(y_new) || !std::isfinite(err)) {
            throw IntegrationFailure("integrate_scalar: non-finite state");
        }

        const double factor =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            y = y_new;
            k1 = k7;
            done = last ? span : done + step;
            ++local.accepted;
            h = std::min(cfg.max_step, step * factor);
        } else {
            ++local.rejected;
            h = step * std::max(factor, 0.1);
            if (h < 1e-14 * std::max(1.0, span)) {
                throw IntegrationFailure("integrate_scalar: step size underflow");
            }
        }
    }
    if (stats) {
        *stats = local;
    }
    return y;
}

} // namespace comblab
