#pragma once

#include <cmath>
#include <string>

#include "catmzi/fock.hpp"

namespace catmzi {

struct IntegratorConfig {
    double step_scale = 0.05;      // h * (fastest system rate) <= step_scale
    double trace_tolerance = 1e-6; // |tr rho - 1| beyond this aborts
    double error_tolerance = 1e-8; // Richardson error budget per unit time
    int max_restarts = 8;          // halvings of the global step before giving up
};

// Fixed-step RK4 with a Richardson error check.  Every step is taken
// once at h and twice at h/2; the difference/15 estimates the local
// error, the extrapolated combination is kept.  If any step exceeds
// the error budget the whole integration restarts with twice the step
// count, so results are a pure function of the inputs.  `drift` maps
// the state to a conserved-quantity violation (trace or norm error)
// checked after every step.
template <class State, class Rhs, class Drift>
void integrate_rk4(State& y, const Rhs& rhs, double t_total, double rate,
                   const IntegratorConfig& cfg, const Drift& drift) {
    if (t_total < 0)
        throw ConfigError("integration time must be non-negative");
    if (t_total == 0)
        return;

    State k1, k2, k3, k4, stage;
    const auto step = [&](const State& s, double h, State& out) {
        rhs(s, k1);
        stage = s + (0.5 * h) * k1;
        rhs(stage, k2);
        stage = s + (0.5 * h) * k2;
        rhs(stage, k3);
        stage = s + h * k3;
        rhs(stage, k4);
        out = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    long n = std::max<long>(1, static_cast<long>(
                 std::ceil(t_total * std::max(rate, 1e-12) / cfg.step_scale)));
    const State y0 = y;
    State full, half;
    for (int attempt = 0;; ++attempt, n *= 2) {
        if (attempt > cfg.max_restarts)
            throw NumericalError("integrator: step rejection budget exhausted");
        y = y0;
        const double h = t_total / double(n);
        bool rejected = false;
        for (long i = 0; i < n; ++i) {
            step(y, h, full);
            step(y, 0.5 * h, half);
            step(half, 0.5 * h, half);
            const double err = (full - half).cwiseAbs().maxCoeff() / 15.0;
            if (err > cfg.error_tolerance * h) {
                rejected = true;
                break;
            }
            y = half + (half - full) / 15.0;
            const double d = drift(y);
            if (d > cfg.trace_tolerance)
                throw NumericalError("integrator: invariant drift " +
                                     std::to_string(d) + " exceeds tolerance");
        }
        if (!rejected)
            return;
    }
}

// Dispersive atom-field evolution with cavity photon loss:
//   drho/dt = -i [u0 n (x) |b><b|, rho] + kappa (2 a rho a+ - {a+a, rho}).
// rho0 must have atom_field structure (atom slowest, b = 0, c = 1).
DensityMatrix evolve_dispersive(const DensityMatrix& rho0, double u0,
                                double kappa, double t,
                                const IntegratorConfig& cfg = {});

} // namespace catmzi
