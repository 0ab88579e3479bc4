#include "decaycert/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decaycert {

ScalarTrajectory ScalarTrajectory::from_solution(ode::Solution<double> sol, double rtol,
                                                 double atol) {
    auto shared = std::make_shared<const ode::Solution<double>>(std::move(sol));
    ScalarTrajectory t;
    t.times_ = shared->times;
    t.values_ = shared->states;
    for (double& v : t.values_) v = std::max(v, 0.0);
    t.blew_up_ = shared->blew_up;
    t.blowup_time_ = shared->blowup_time;
    t.rtol_ = rtol;
    t.atol_ = atol;
    t.stats_ = shared->stats;
    t.dense_ = [shared](double tt) { return shared->at(tt); };
    return t;
}

ScalarTrajectory ScalarTrajectory::from_samples(std::vector<double> times,
                                                std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 1)
        throw std::invalid_argument("ScalarTrajectory: mismatched sample arrays");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("ScalarTrajectory: times must be strictly increasing");
    ScalarTrajectory t;
    t.times_ = std::move(times);
    t.values_ = std::move(values);
    for (double& v : t.values_) v = std::max(v, 0.0);
    return t;
}

double ScalarTrajectory::value_at(double t) const {
    if (dense_) return std::max(dense_(t), 0.0);
    // linear interpolation fallback for sample-built trajectories
    const double tol = 1e-12 * (1.0 + std::abs(times_.back()));
    if (t < times_.front() - tol || t > times_.back() + tol)
        throw std::out_of_range("ScalarTrajectory::value_at: time outside range");
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i > 0) --i;
    if (i + 1 >= times_.size()) return values_.back();
    const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return std::max(values_[i] + w * (values_[i + 1] - values_[i]), 0.0);
}

ScalarTrajectory solve_extremal(const NonlinearityBound& bound, const DissipationProfile& gamma,
                                double g0, double horizon, double rtol, double atol) {
    if (!(g0 >= 0.0)) throw std::invalid_argument("solve_extremal: g0 must be nonnegative");
    if (!(horizon > 0.0)) throw std::invalid_argument("solve_extremal: horizon must be positive");
    if (gamma.max_time() < horizon)
        throw std::invalid_argument("solve_extremal: horizon exceeds the tabulated span");

    // alpha is defined for v >= 0 only; tiny negative excursions of the
    // numerical state are evaluated at 0
    auto rhs = [&](double t, double g) {
        const double gp = std::max(g, 0.0);
        return -gamma.value(t) * g + bound.alpha(t, gp) + bound.beta(t);
    };
    ode::Options opts;
    opts.rtol = rtol;
    opts.atol = atol;
    auto sol = ode::integrate_dopri5(rhs, 0.0, g0, horizon, opts);
    return ScalarTrajectory::from_solution(std::move(sol), rtol, atol);
}

DominanceReport verify_envelope(const ScalarTrajectory& traj, const Envelope& env,
                                const DissipationProfile& gamma) {
    if (env.max_time() < traj.t_end())
        throw std::invalid_argument("verify_envelope: envelope does not cover the trajectory");

    DominanceReport rep;
    rep.tolerance = 10.0 * traj.atol();
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    auto check = [&](double t) {
        const double m = traj.value_at(t) - env.bound(t);
        if (m > rep.worst_margin) {
            rep.worst_margin = m;
            rep.worst_time = t;
        }
        rep.points_checked++;
    };

    const auto& ts = traj.times();
    check(ts.front());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        for (int j = 1; j < 8; ++j)
            check(ts[i] + (ts[i + 1] - ts[i]) * static_cast<double>(j) / 8.0);
        check(ts[i + 1]);
    }
    rep.pass = rep.worst_margin <= rep.tolerance;

    // same comparison after the substitution v = g*a, where the proof
    // actually lives; only meaningful while a(t) stays representable
    const double t_cap = std::min(traj.t_end(), 20.0);
    if (gamma.max_time() >= t_cap && std::isfinite(gamma.integrating_factor(t_cap))) {
        double worst = -std::numeric_limits<double>::infinity();
        for (double t : ts) {
            if (t > t_cap) break;
            const double a = gamma.integrating_factor(t);
            worst = std::max(worst, a * (traj.value_at(t) - env.bound(t)));
        }
        rep.transformed_margin = worst;
    }
    return rep;
}

ScalarTrajectory transform_v(const ScalarTrajectory& traj, const DissipationProfile& gamma) {
    if (gamma.max_time() < traj.t_end())
        throw std::invalid_argument("transform_v: profile does not cover the trajectory");
    std::vector<double> values;
    values.reserve(traj.values().size());
    for (std::size_t i = 0; i < traj.times().size(); ++i) {
        const double a = gamma.integrating_factor(traj.times()[i]);
        if (!std::isfinite(a))
            throw std::overflow_error("transform_v: integrating factor overflow; "
                                      "restrict to a shorter horizon");
        values.push_back(traj.values()[i] * a);
    }
    return ScalarTrajectory::from_samples(traj.times(), std::move(values));
}

}  // namespace decaycert
