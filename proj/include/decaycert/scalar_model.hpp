// Scalar data of the decay-certification problem: dissipation profiles
// gamma(t), nonlinearity/forcing majorants alpha(t,v) / beta(t), and
// positive envelope families mu(t) with exact log-derivatives.

#ifndef DECAYCERT_SCALAR_MODEL_HPP
#define DECAYCERT_SCALAR_MODEL_HPP

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace decaycert {

/// Nonnegative dissipation coefficient gamma(t) appearing in
/// Re<A(t)u, u> <= -gamma(t) ||u||^2, together with its exact
/// integrating factor a(t) = exp(int_0^t gamma).
class DissipationProfile {
public:
    enum class Kind { Constant, PowerLaw, Tabulated };

    /// gamma(t) = kappa_abs, kappa_abs > 0.
    static DissipationProfile constant(double kappa_abs);
    /// gamma(t) = c1 / (1+t)^q with c1 > 0 and q <= 1.
    static DissipationProfile power_law(double c1, double q);
    /// Piecewise-linear interpolation of nonnegative samples on a strictly
    /// increasing time grid. Queries outside the grid span are range errors.
    static DissipationProfile tabulated(std::vector<double> times, std::vector<double> values);

    /// gamma(t); never negative.
    double value(double t) const;
    /// a(t) = exp(int_0^t gamma(s) ds). Closed form for Constant/PowerLaw,
    /// exact piecewise integration for Tabulated.
    double integrating_factor(double t) const;

    Kind kind() const { return kind_; }
    double kappa_abs() const { return c_; }
    double c1() const { return c_; }
    double q() const { return q_; }
    /// Largest queryable time (infinity for the analytic families).
    double max_time() const;

private:
    DissipationProfile() = default;
    Kind kind_ = Kind::Constant;
    double c_ = 0.0;  // kappa_abs or c1
    double q_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> cum_;  // cumulative integral of gamma up to grid_[i]
};

/// Majorant pair for the nonlinear and forcing terms: alpha(t, v)
/// non-decreasing in v, plus beta(t) >= 0 (zero unless supplied).
class NonlinearityBound {
public:
    enum class Kind { Zero, Power, General };

    /// alpha identically zero (purely linear dynamics).
    static NonlinearityBound zero();
    /// alpha(t, v) = c0 * v^p with c0 > 0, p > 1.
    static NonlinearityBound power(double c0, double p);
    /// Black-box alpha; monotonicity in v is spot-checked at construction on
    /// the supplied v-grid (default: 256 log-spaced points in [1e-12, 1e3])
    /// at a handful of sample times.
    static NonlinearityBound general(std::function<double(double, double)> alpha,
                                     std::span<const double> v_probe = {});

    /// Returns a copy carrying the forcing term beta(t).
    NonlinearityBound with_beta(std::function<double(double)> beta) const;

    double alpha(double t, double v) const;
    double beta(double t) const;
    bool beta_is_zero() const { return !beta_; }

    Kind kind() const { return kind_; }
    bool is_power() const { return kind_ == Kind::Power; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    double c0() const { return c0_; }
    double p() const { return p_; }

private:
    NonlinearityBound() = default;
    Kind kind_ = Kind::Zero;
    double c0_ = 0.0;
    double p_ = 0.0;
    std::function<double(double, double)> alpha_;
    std::function<double(double)> beta_;
};

/// Positive, continuously differentiable envelope mu(t); the certified decay
/// bound is 1/mu(t).
class Envelope {
public:
    enum class Kind { Exponential, PowerLaw, Tabulated };

    /// mu(t) = lambda * exp(b t), lambda, b > 0.
    static Envelope exponential(double lambda, double b);
    /// mu(t) = lambda * (1+t)^nu, lambda, nu > 0.
    static Envelope power_law(double lambda, double nu);
    /// Positive samples on a strictly increasing grid; mu interpolates
    /// log-linearly, so the log-derivative is the finite-difference slope of
    /// log mu on each segment.
    static Envelope tabulated(std::vector<double> times, std::vector<double> values);

    double mu(double t) const;
    /// dot(mu)/mu; exact (b, resp. nu/(1+t)) for the analytic families.
    double log_derivative(double t) const;
    /// 1/mu(t).
    double bound(double t) const { return 1.0 / mu(t); }

    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    /// b for Exponential, nu for PowerLaw.
    double rate() const { return rate_; }
    double max_time() const;

    /// Tabulated data access (empty for the analytic families).
    const std::vector<double>& grid() const { return grid_; }
    std::vector<double> values() const;

    std::string family_name() const;

private:
    Envelope() = default;
    Kind kind_ = Kind::Exponential;
    double lambda_ = 1.0;
    double rate_ = 1.0;
    std::vector<double> grid_;
    std::vector<double> log_values_;
};

}  // namespace decaycert

#endif
