#include "decaycert/scalar_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decaycert {

namespace {

void require_nonneg_time(double t) {
    if (!(t >= 0.0))
        throw std::domain_error("time argument must be nonnegative");
}

void check_grid(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() < 2 || times.size() != values.size())
        throw std::invalid_argument("tabulated data needs matching grids with >= 2 points");
    if (!(times.front() >= 0.0))
        throw std::invalid_argument("tabulated grid must start at a nonnegative time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("tabulated grid must be strictly increasing");
}

// index of the segment [times[i], times[i+1]] containing t
std::size_t segment_index(const std::vector<double>& times, double t) {
    if (t < times.front() || t > times.back())
        throw std::out_of_range("query outside tabulated span");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > 0) --i;
    if (i + 1 >= times.size()) i = times.size() - 2;
    return i;
}

}  // namespace

// ---------------------------------------------------------------------------
// DissipationProfile

DissipationProfile DissipationProfile::constant(double kappa_abs) {
    if (!(kappa_abs > 0.0))
        throw std::invalid_argument("constant profile requires kappa_abs > 0");
    DissipationProfile p;
    p.kind_ = Kind::Constant;
    p.c_ = kappa_abs;
    return p;
}

DissipationProfile DissipationProfile::power_law(double c1, double q) {
    if (!(c1 > 0.0))
        throw std::invalid_argument("power-law profile requires c1 > 0");
    if (!(q <= 1.0))
        throw std::invalid_argument("power-law profile requires q <= 1");
    DissipationProfile p;
    p.kind_ = Kind::PowerLaw;
    p.c_ = c1;
    p.q_ = q;
    return p;
}

DissipationProfile DissipationProfile::tabulated(std::vector<double> times,
                                                 std::vector<double> values) {
    check_grid(times, values);
    for (double v : values)
        if (!(v >= 0.0))
            throw std::invalid_argument("tabulated gamma values must be nonnegative");
    DissipationProfile p;
    p.kind_ = Kind::Tabulated;
    p.grid_ = std::move(times);
    p.values_ = std::move(values);
    // cumulative integral; the trapezoid rule is exact for a piecewise-linear
    // integrand, so no quadrature error enters downstream
    p.cum_.resize(p.grid_.size());
    p.cum_[0] = 0.0;
    for (std::size_t i = 1; i < p.grid_.size(); ++i) {
        const double dt = p.grid_[i] - p.grid_[i - 1];
        p.cum_[i] = p.cum_[i - 1] + 0.5 * (p.values_[i] + p.values_[i - 1]) * dt;
    }
    return p;
}

double DissipationProfile::value(double t) const {
    require_nonneg_time(t);
    switch (kind_) {
        case Kind::Constant:
            return c_;
        case Kind::PowerLaw:
            return c_ / std::pow(1.0 + t, q_);
        case Kind::Tabulated: {
            const std::size_t i = segment_index(grid_, t);
            const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
            return values_[i] + w * (values_[i + 1] - values_[i]);
        }
    }
    return 0.0;
}

double DissipationProfile::integrating_factor(double t) const {
    require_nonneg_time(t);
    switch (kind_) {
        case Kind::Constant:
            return std::exp(c_ * t);
        case Kind::PowerLaw:
            if (q_ == 1.0) return std::pow(1.0 + t, c_);
            return std::exp(c_ * (std::pow(1.0 + t, 1.0 - q_) - 1.0) / (1.0 - q_));
        case Kind::Tabulated: {
            if (t < grid_.front())
                throw std::out_of_range("query outside tabulated span");
            const std::size_t i = segment_index(grid_, t);
            const double gt = value(t);
            const double partial = 0.5 * (values_[i] + gt) * (t - grid_[i]);
            return std::exp(cum_[i] + partial);
        }
    }
    return 1.0;
}

double DissipationProfile::max_time() const {
    return kind_ == Kind::Tabulated ? grid_.back()
                                    : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// NonlinearityBound

NonlinearityBound NonlinearityBound::zero() {
    NonlinearityBound b;
    b.kind_ = Kind::Zero;
    return b;
}

NonlinearityBound NonlinearityBound::power(double c0, double p) {
    if (!(c0 > 0.0))
        throw std::invalid_argument("power majorant requires c0 > 0");
    if (!(p > 1.0))
        throw std::invalid_argument("power majorant requires p > 1");
    NonlinearityBound b;
    b.kind_ = Kind::Power;
    b.c0_ = c0;
    b.p_ = p;
    return b;
}

NonlinearityBound NonlinearityBound::general(std::function<double(double, double)> alpha,
                                             std::span<const double> v_probe) {
    if (!alpha)
        throw std::invalid_argument("general majorant requires a callable alpha");
    std::vector<double> grid(v_probe.begin(), v_probe.end());
    if (grid.empty()) {
        grid.resize(256);
        const double lo = std::log(1e-12), hi = std::log(1e3);
        for (std::size_t i = 0; i < grid.size(); ++i)
            grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / 255.0);
    } else {
        std::sort(grid.begin(), grid.end());
    }
    for (double t : {0.0, 1.0, 10.0, 100.0}) {
        double prev = -std::numeric_limits<double>::infinity();
        for (double v : grid) {
            const double a = alpha(t, v);
            if (!(a >= 0.0))
                throw std::invalid_argument("alpha(t,v) sampled negative");
            if (a < prev)
                throw std::invalid_argument("alpha(t,v) is not non-decreasing in v");
            prev = a;
        }
    }
    NonlinearityBound b;
    b.kind_ = Kind::General;
    b.alpha_ = std::move(alpha);
    return b;
}

NonlinearityBound NonlinearityBound::with_beta(std::function<double(double)> beta) const {
    NonlinearityBound b = *this;
    b.beta_ = std::move(beta);
    return b;
}

double NonlinearityBound::alpha(double t, double v) const {
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::Power:
            return c0_ * std::pow(v, p_);
        case Kind::General:
            return alpha_(t, v);
    }
    return 0.0;
}

double NonlinearityBound::beta(double t) const {
    if (!beta_) return 0.0;
    const double b = beta_(t);
    if (!(b >= 0.0))
        throw std::domain_error("beta(t) evaluated negative");
    return b;
}

// ---------------------------------------------------------------------------
// Envelope

Envelope Envelope::exponential(double lambda, double b) {
    if (!(lambda > 0.0) || !(b > 0.0))
        throw std::invalid_argument("exponential envelope requires lambda > 0, b > 0");
    Envelope e;
    e.kind_ = Kind::Exponential;
    e.lambda_ = lambda;
    e.rate_ = b;
    return e;
}

Envelope Envelope::power_law(double lambda, double nu) {
    if (!(lambda > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("power-law envelope requires lambda > 0, nu > 0");
    Envelope e;
    e.kind_ = Kind::PowerLaw;
    e.lambda_ = lambda;
    e.rate_ = nu;
    return e;
}

Envelope Envelope::tabulated(std::vector<double> times, std::vector<double> values) {
    check_grid(times, values);
    Envelope e;
    e.kind_ = Kind::Tabulated;
    e.grid_ = std::move(times);
    e.log_values_.reserve(values.size());
    for (double v : values) {
        if (!(v > 0.0))
            throw std::invalid_argument("tabulated envelope values must be positive");
        e.log_values_.push_back(std::log(v));
    }
    return e;
}

double Envelope::mu(double t) const {
    require_nonneg_time(t);
    switch (kind_) {
        case Kind::Exponential:
            return lambda_ * std::exp(rate_ * t);
        case Kind::PowerLaw:
            return lambda_ * std::pow(1.0 + t, rate_);
        case Kind::Tabulated: {
            const std::size_t i = segment_index(grid_, t);
            const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
            return std::exp(log_values_[i] + w * (log_values_[i + 1] - log_values_[i]));
        }
    }
    return 1.0;
}

double Envelope::log_derivative(double t) const {
    require_nonneg_time(t);
    switch (kind_) {
        case Kind::Exponential:
            return rate_;
        case Kind::PowerLaw:
            return rate_ / (1.0 + t);
        case Kind::Tabulated: {
            const std::size_t i = segment_index(grid_, t);
            return (log_values_[i + 1] - log_values_[i]) / (grid_[i + 1] - grid_[i]);
        }
    }
    return 0.0;
}

double Envelope::max_time() const {
    return kind_ == Kind::Tabulated ? grid_.back()
                                    : std::numeric_limits<double>::infinity();
}

std::vector<double> Envelope::values() const {
    std::vector<double> out;
    out.reserve(log_values_.size());
    for (double lv : log_values_) out.push_back(std::exp(lv));
    return out;
}

std::string Envelope::family_name() const {
    switch (kind_) {
        case Kind::Exponential: return "exponential";
        case Kind::PowerLaw: return "power-law";
        case Kind::Tabulated: return "tabulated";
    }
    return "";
}

}  // namespace decaycert
