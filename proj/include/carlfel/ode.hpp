// Time integration shared by every dynamical formulation.
//
// Two integrators over a common State concept:
//   * integrate_adaptive — Dormand–Prince 5(4) embedded pair with FSAL and
//     PI-free step control; the workhorse.
//   * integrate_rk4      — classical fixed-step RK4, kept for convergence
//     order measurements and cross-checks.
//
// State concept (duck-typed):
//   S s2 = s.like_zero();          // same shape, all dynamical entries zero
//   s.add_scaled(a, other);        // s += a * other, entrywise
//   double m = s.max_abs();        // max |entry|, NaN-propagating
//   s.tau                          // double, bookkeeping only (set by the
//                                  //   integrator before each observer call;
//                                  //   all systems here are autonomous)
//
// Deriv concept: f(y, dydt) assigns every dynamical entry of dydt.
// Observer concept: obs(y) called at tau = 0 and at each sample point.
//
// Sampling: observation times are the exact multiples k * sample_dt that fit
// in [0, tau_end] (k * sample_dt <= tau_end + 1e-9 * sample_dt).  Steps are
// clipped to land on sample points exactly, so no dense-output interpolation
// is involved and results are bit-deterministic.
#ifndef CARLFEL_ODE_HPP
#define CARLFEL_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "carlfel/common.hpp"

namespace carlfel {

struct IntegrationOptions {
    double rtol = 1.0e-8;
    double atol = 1.0e-10;
    double dt_init = 1.0e-3;
    double dt_min = 1.0e-12;   // underflow => NumericalAbort
    double safety = 0.9;
    std::size_t max_steps = 50'000'000;  // attempted steps; exceeded => NumericalAbort

    void validate() const {
        require(rtol > 0 && finite(rtol), "IntegrationOptions: rtol must be > 0");
        require(atol > 0 && finite(atol), "IntegrationOptions: atol must be > 0");
        require(dt_init > 0 && finite(dt_init), "IntegrationOptions: dt_init must be > 0");
        require(dt_min > 0 && finite(dt_min), "IntegrationOptions: dt_min must be > 0");
        require(safety > 0 && safety < 1, "IntegrationOptions: safety must be in (0,1)");
        require(max_steps >= 1, "IntegrationOptions: max_steps must be >= 1");
    }
};

namespace detail {

// Dormand–Prince 5(4) coefficients.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a2[1] = {1.0 / 5};
inline constexpr double dp_a3[2] = {3.0 / 40, 9.0 / 40};
inline constexpr double dp_a4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
inline constexpr double dp_a5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                                    -212.0 / 729};
inline constexpr double dp_a6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                                    49.0 / 176, -5103.0 / 18656};
// 5th-order solution weights (also row a7 — FSAL).
inline constexpr double dp_b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84, 0.0};
// 4th-order embedded weights.
inline constexpr double dp_b4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695,
                                    393.0 / 640,    -92097.0 / 339200,
                                    187.0 / 2100,   1.0 / 40};

/// Sample grid: number of sample intervals covering [0, tau_end].
inline std::size_t sample_count(double tau_end, double sample_dt) {
    require(tau_end > 0 && finite(tau_end), "integrate: tau_end must be > 0");
    require(sample_dt > 0 && finite(sample_dt), "integrate: sample_dt must be > 0");
    const auto n = static_cast<std::size_t>(
        std::floor(tau_end / sample_dt + 1.0e-9));
    require(n >= 1, describe("integrate: tau_end ", tau_end,
                             " shorter than one sample interval ", sample_dt));
    return n;
}

}  // namespace detail

/// Adaptive Dormand–Prince 5(4).  On return y holds the state at the last
/// sample point.  Throws NumericalAbort (carrying the last sample time) if
/// the step size underflows or the state stops being finite.
template <class State, class Deriv, class Observer>
void integrate_adaptive(State& y, Deriv&& f, double tau_end, double sample_dt,
                        Observer&& obs, const IntegrationOptions& opt = {}) {
    using namespace detail;
    opt.validate();
    const std::size_t n_samples = sample_count(tau_end, sample_dt);

    y.tau = 0.0;
    obs(static_cast<const State&>(y));

    State k1 = y.like_zero(), k2 = y.like_zero(), k3 = y.like_zero(), k4 = y.like_zero(),
          k5 = y.like_zero(), k6 = y.like_zero(), k7 = y.like_zero();
    State stage = y.like_zero(), y_new = y.like_zero(), err = y.like_zero();

    f(y, k1);  // FSAL seed
    double tau = 0.0;
    double dt = opt.dt_init;
    std::size_t attempted = 0;

    for (std::size_t s = 1; s <= n_samples; ++s) {
        const double tau_target = static_cast<double>(s) * sample_dt;
        while (tau < tau_target) {
            if (++attempted > opt.max_steps)
                throw NumericalAbort(
                    describe("integrate_adaptive: exceeded max_steps = ",
                             opt.max_steps, " at tau = ", tau),
                    tau);
            const double h = std::min(dt, tau_target - tau);
            if (h < opt.dt_min)
                throw NumericalAbort(
                    describe("integrate_adaptive: step size underflow (h = ", h,
                             ") at tau = ", tau),
                    tau);

            auto build_stage = [&](const double* a, int n_prev) {
                stage = y;
                const State* ks[6] = {&k1, &k2, &k3, &k4, &k5, &k6};
                for (int i = 0; i < n_prev; ++i) stage.add_scaled(h * a[i], *ks[i]);
            };
            build_stage(dp_a2, 1);
            f(stage, k2);
            build_stage(dp_a3, 2);
            f(stage, k3);
            build_stage(dp_a4, 3);
            f(stage, k4);
            build_stage(dp_a5, 4);
            f(stage, k5);
            build_stage(dp_a6, 5);
            f(stage, k6);
            build_stage(dp_b5, 6);  // b5 row == a7 row (FSAL)
            y_new = stage;
            f(y_new, k7);

            err = y.like_zero();
            const State* ks[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
            for (int i = 0; i < 7; ++i) {
                const double d = dp_b5[i] - dp_b4[i];
                if (d != 0.0) err.add_scaled(h * d, *ks[i]);
            }

            const double scale =
                opt.atol + opt.rtol * std::max(y.max_abs(), y_new.max_abs());
            const double err_norm = err.max_abs() / scale;

            if (std::isfinite(err_norm) && err_norm <= 1.0) {
                tau += h;
                y = y_new;
                k1 = k7;  // FSAL: last stage is next step's first stage
                const double grow =
                    (err_norm == 0.0)
                        ? 5.0
                        : std::clamp(opt.safety * std::pow(err_norm, -0.2), 0.2, 5.0);
                dt = h * grow;
            } else {
                const double shrink =
                    std::isfinite(err_norm)
                        ? std::clamp(opt.safety * std::pow(err_norm, -0.2), 0.2, 1.0)
                        : 0.5;  // NaN/inf: halve and retry
                dt = h * shrink;
                if (dt < opt.dt_min)
                    throw NumericalAbort(
                        describe("integrate_adaptive: state stopped being finite "
                                 "near tau = ", tau, " (step rejected below dt_min)"),
                        tau);
            }
        }
        y.tau = tau_target;
        if (!std::isfinite(y.max_abs()))
            throw NumericalAbort(
                describe("integrate_adaptive: non-finite state at sample tau = ",
                         tau_target),
                tau_target);
        obs(static_cast<const State&>(y));
    }
}

/// Fixed-step classical RK4.  dt is snapped so each sample interval holds a
/// whole number of steps (at least one).
template <class State, class Deriv, class Observer>
void integrate_rk4(State& y, Deriv&& f, double tau_end, double dt, double sample_dt,
                   Observer&& obs) {
    using namespace detail;
    require(dt > 0 && finite(dt), "integrate_rk4: dt must be > 0");
    const std::size_t n_samples = sample_count(tau_end, sample_dt);
    const auto steps_per_sample = static_cast<std::size_t>(
        std::max(1.0, std::ceil(sample_dt / dt - 1.0e-9)));
    const double h = sample_dt / static_cast<double>(steps_per_sample);

    y.tau = 0.0;
    obs(static_cast<const State&>(y));

    State k1 = y.like_zero(), k2 = y.like_zero(), k3 = y.like_zero(), k4 = y.like_zero();
    State stage = y.like_zero();

    for (std::size_t s = 1; s <= n_samples; ++s) {
        for (std::size_t i = 0; i < steps_per_sample; ++i) {
            f(y, k1);
            stage = y;
            stage.add_scaled(0.5 * h, k1);
            f(stage, k2);
            stage = y;
            stage.add_scaled(0.5 * h, k2);
            f(stage, k3);
            stage = y;
            stage.add_scaled(h, k3);
            f(stage, k4);
            y.add_scaled(h / 6.0, k1);
            y.add_scaled(h / 3.0, k2);
            y.add_scaled(h / 3.0, k3);
            y.add_scaled(h / 6.0, k4);
        }
        y.tau = static_cast<double>(s) * sample_dt;
        if (!std::isfinite(y.max_abs()))
            throw NumericalAbort(
                describe("integrate_rk4: non-finite state at sample tau = ", y.tau),
                y.tau);
        obs(static_cast<const State&>(y));
    }
}

/// Observer that does nothing — for callers that only want the final state.
inline constexpr auto observe_nothing = [](const auto&) {};

}  // namespace carlfel

#endif
