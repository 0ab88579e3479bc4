// Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4), FSAL)
// with fourth-order dense output, usable for scalar states, Eigen vectors
// and Eigen matrices alike.

#ifndef DECAYCERT_ODE_HPP
#define DECAYCERT_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>
#include <type_traits>

#include <Eigen/Core>

namespace decaycert::ode {

struct Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// Integration stops (with a flag, not an error) once the state magnitude
    /// exceeds this threshold.
    double blowup_threshold = 1e12;
    long max_steps = 2000000;
    /// 0 lets the integrator pick the initial step itself.
    double initial_step = 0.0;
    bool store_dense = true;
};

struct StepStats {
    long steps = 0;
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

namespace detail {

template <class S>
concept EigenDense = requires(const S& s) {
    s.cwiseAbs();
    s.norm();
    s.size();
};

inline double magnitude(double y) { return std::abs(y); }

template <EigenDense S>
double magnitude(const S& y) { return y.norm(); }

// Scaled RMS norm of the local error estimate, per-component scale
// sc_i = atol + rtol * max(|y0_i|, |y1_i|).
inline double error_norm(double e, double y0, double y1, double atol, double rtol) {
    const double sc = atol + rtol * std::max(std::abs(y0), std::abs(y1));
    return std::abs(e) / sc;
}

template <EigenDense S>
double error_norm(const S& e, const S& y0, const S& y1, double atol, double rtol) {
    const auto sc = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
    const double q = (e.cwiseAbs().array() / sc).square().sum();
    return std::sqrt(q / static_cast<double>(e.size()));
}

}  // namespace detail

/// Coefficients of the quartic interpolant over one accepted step.
template <class State>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State r1, r2, r3, r4, r5;

    State eval(double t) const {
        const double theta = (t - t0) / h;
        const double th1 = 1.0 - theta;
        return r1 + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)));
    }
};

template <class State>
struct Solution {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<DenseStep<State>> dense;
    bool blew_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    StepStats stats;

    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    /// Dense-output evaluation anywhere inside [t_begin, t_end].
    State at(double t) const {
        if (dense.empty())
            throw std::logic_error("ode::Solution::at: dense output was not stored");
        const double tol = 1e-12 * (1.0 + std::abs(t_end()));
        if (t < t_begin() - tol || t > t_end() + tol)
            throw std::out_of_range("ode::Solution::at: time outside integration range");
        t = std::clamp(t, t_begin(), t_end());
        // last step whose start time is <= t
        auto it = std::upper_bound(dense.begin(), dense.end(), t,
                                   [](double v, const DenseStep<State>& s) { return v < s.t0; });
        if (it != dense.begin()) --it;
        return it->eval(t);
    }
};

/// Integrates dy/dt = f(t, y) from t0 to t_end with the Dormand-Prince 5(4)
/// pair. f must be callable as State(double, const State&).
template <class State, class RHS>
Solution<State> integrate_dopri5(RHS&& f, double t0, State y0, double t_end,
                                 const Options& opts = {}) {
    // the right-hand side must materialize its result; returning an Eigen
    // expression would leave references to temporaries of the callable body
    static_assert(
        std::is_same_v<std::remove_cvref_t<std::invoke_result_t<RHS&, double, const State&>>,
                       State>,
        "RHS must return the state type itself");
    if (!(opts.rtol > 0.0) || !(opts.atol > 0.0))
        throw std::invalid_argument("integrate_dopri5: tolerances must be positive");
    if (t_end < t0)
        throw std::invalid_argument("integrate_dopri5: t_end must be >= t0");

    // Dormand-Prince 5(4) tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded 4th-order error weights (b - b*)
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    constexpr double d1 = -12715105075.0 / 11282082432.0;
    constexpr double d3 = 87487479700.0 / 32700410799.0;
    constexpr double d4 = -10690763975.0 / 1880347072.0;
    constexpr double d5 = 701980252875.0 / 199316789632.0;
    constexpr double d6 = -1453857185.0 / 822651844.0;
    constexpr double d7 = 69997945.0 / 29380423.0;

    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;

    Solution<State> sol;
    sol.times.push_back(t0);
    sol.states.push_back(y0);
    if (t_end == t0) return sol;

    double t = t0;
    State y = y0;
    State k1 = f(t, y);
    sol.stats.rhs_evaluations++;

    double h = opts.initial_step;
    if (h <= 0.0) {
        // crude version of Hairer's starting-step heuristic
        const double d0 = detail::magnitude(y);
        const double dk = detail::magnitude(k1);
        double h0 = (d0 < 1e-5 || dk < 1e-5) ? 1e-6 : 0.01 * d0 / dk;
        h0 = std::min(h0, t_end - t0);
        State y1 = y + h0 * k1;
        State f1 = f(t0 + h0, y1);
        sol.stats.rhs_evaluations++;
        const double d2 = detail::magnitude(State(f1 - k1)) / h0;
        const double dm = std::max(dk, d2);
        const double h1 = dm > 1e-15 ? std::pow(0.01 / dm, 0.2) : std::max(1e-6, h0 * 1e3);
        h = std::min({100.0 * h0, h1, t_end - t0});
    }

    while (t < t_end) {
        if (++sol.stats.steps > opts.max_steps)
            throw std::runtime_error("integrate_dopri5: step limit exceeded");
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(t), 1.0);
        if (h < h_min)
            throw std::runtime_error("integrate_dopri5: step size underflow");
        bool last = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }

        State yt = y + h * (a21 * k1);
        State k2 = f(t + c2 * h, yt);
        yt = y + h * (a31 * k1 + a32 * k2);
        State k3 = f(t + c3 * h, yt);
        yt = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        State k4 = f(t + c4 * h, yt);
        yt = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        State k5 = f(t + c5 * h, yt);
        yt = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        State k6 = f(t + h, yt);
        State y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        State k7 = f(t + h, y1);  // FSAL
        sol.stats.rhs_evaluations += 6;

        const State err = State(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double en = detail::error_norm(err, y, y1, opts.atol, opts.rtol);

        if (en <= 1.0) {  // accept
            sol.stats.accepted++;
            if (opts.store_dense) {
                DenseStep<State> ds;
                ds.t0 = t;
                ds.h = h;
                ds.r1 = y;
                ds.r2 = State(y1 - y);
                ds.r3 = State(h * k1 - ds.r2);
                ds.r4 = State(ds.r2 - h * k7 - ds.r3);
                ds.r5 = State(h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7));
                sol.dense.push_back(std::move(ds));
            }
            t = last ? t_end : t + h;
            y = y1;
            k1 = k7;
            sol.times.push_back(t);
            sol.states.push_back(y);
            if (detail::magnitude(y) > opts.blowup_threshold) {
                sol.blew_up = true;
                sol.blowup_time = t;
                break;
            }
            double fac = fac_max;
            if (en > 0.0) fac = std::clamp(safety * std::pow(en, -0.2), fac_min, fac_max);
            h *= fac;
        } else {  // reject; NaN error norms land here as well
            sol.stats.rejected++;
            double fac = fac_min;
            if (std::isfinite(en)) fac = std::clamp(safety * std::pow(en, -0.2), fac_min, 1.0);
            h *= fac;
        }
    }
    return sol;
}

}  // namespace decaycert::ode

#endif
