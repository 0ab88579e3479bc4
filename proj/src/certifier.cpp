#include "decaycert/certifier.hpp"

#include <algorithm>
#include <cmath>

namespace decaycert {

namespace {

// Comparisons tolerate a few ulps so that parameter choices which saturate a
// constraint exactly in real arithmetic still certify in floating point.
// Anything beyond ~1e-14 of slack would blur genuine refutations; rate
// perturbations of 1e-6 flip these checks decisively.
constexpr double kSlack = 64.0 * std::numeric_limits<double>::epsilon();

double slack_scale(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

bool leq(double lhs, double rhs) { return lhs <= rhs + kSlack * slack_scale(lhs, rhs); }

bool lt_strict(double lhs, double rhs) { return lhs < rhs - kSlack * slack_scale(lhs, rhs); }

bool initial_holds(double g0, double bound0, Strictness s) {
    return s == Strictness::Strict ? lt_strict(g0, bound0) : leq(g0, bound0);
}

void check_power_args(double c0, double p) {
    if (!(c0 > 0.0)) throw std::invalid_argument("c0 must be positive");
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
}

}  // namespace

std::string to_string(CertStatus s) {
    switch (s) {
        case CertStatus::CertifiedClosedForm: return "certified-closed-form";
        case CertStatus::CertifiedGrid: return "certified-grid";
        case CertStatus::Refuted: return "refuted";
        case CertStatus::Inconclusive: return "inconclusive";
    }
    return "";
}

std::string to_string(Strictness s) {
    return s == Strictness::Strict ? "strict" : "non-strict";
}

bool FeasibilityReport::feasible() const {
    return std::all_of(constraints.begin(), constraints.end(),
                       [](const ConstraintCheck& c) { return c.satisfied; });
}

const ConstraintCheck* FeasibilityReport::first_failure() const {
    for (const auto& c : constraints)
        if (!c.satisfied) return &c;
    return nullptr;
}

ExponentialRate exponential_params(double c0, double p, double kappa_abs, double eps) {
    check_power_args(c0, p);
    if (!(kappa_abs > 0.0)) throw std::invalid_argument("kappa_abs must be positive");
    if (!(eps > 0.0) || !(eps < kappa_abs))
        throw std::domain_error("eps must lie in the open interval (0, kappa_abs)");
    const double lambda = std::pow(c0 / eps, 1.0 / (p - 1.0));
    return {lambda, kappa_abs - eps};
}

PowerLawRate powerlaw_params(double c0, double p, double c1, double q, double eps) {
    check_power_args(c0, p);
    if (!(c1 > 0.0)) throw std::invalid_argument("c1 must be positive");
    if (!(q <= 1.0)) throw std::domain_error("q must satisfy q <= 1");
    if (!(eps > 0.0) || !(eps < c1))
        throw std::domain_error("eps must lie in the open interval (0, c1)");
    const double nu = c1 - eps;
    if (!leq(q, (p - 1.0) * nu))
        throw infeasibility_error("envelope_exponent",
                                  "(p-1)*(c1-eps) >= q fails: the envelope exponent nu = c1-eps "
                                  "is too small for this q; decrease eps or increase p");
    return {std::pow(c0 / eps, 1.0 / (p - 1.0)), nu};
}

ClosedFormResult certify_closed_form(const NonlinearityBound& bound,
                                     const DissipationProfile& gamma, const Envelope& env,
                                     double g0, Strictness strictness) {
    if (!(g0 >= 0.0)) throw std::invalid_argument("g0 must be nonnegative");

    ClosedFormResult res;
    res.certificate.envelope = env;
    res.certificate.strictness = strictness;

    const bool exp_pair = gamma.kind() == DissipationProfile::Kind::Constant &&
                          env.kind() == Envelope::Kind::Exponential;
    const bool pow_pair = gamma.kind() == DissipationProfile::Kind::PowerLaw &&
                          env.kind() == Envelope::Kind::PowerLaw;
    if (!bound.is_power() || !bound.beta_is_zero() || (!exp_pair && !pow_pair)) {
        res.certificate.status = CertStatus::Inconclusive;
        res.certificate.failed_constraint = "closed-form path needs a power majorant with zero "
                                            "forcing and matching profile/envelope families";
        return res;
    }

    const double lambda = env.lambda();
    const double rate = env.rate();
    const double c0 = bound.c0();
    const double p = bound.p();
    auto& checks = res.feasibility.constraints;
    res.feasibility.lambda = lambda;
    res.feasibility.rate = rate;

    const double budget_lhs = c0 / std::pow(lambda, p - 1.0) + rate;
    if (exp_pair) {
        checks.push_back({"rate_budget", budget_lhs, gamma.kappa_abs(),
                          leq(budget_lhs, gamma.kappa_abs())});
    } else {
        checks.push_back({"profile_exponent", gamma.q(), 1.0, gamma.q() <= 1.0});
        checks.push_back({"envelope_exponent", gamma.q(), (p - 1.0) * rate,
                          leq(gamma.q(), (p - 1.0) * rate)});
        checks.push_back({"rate_budget", budget_lhs, gamma.c1(), leq(budget_lhs, gamma.c1())});
    }
    const double bound0 = 1.0 / lambda;  // mu(0) = lambda for both families
    const bool init_ok = initial_holds(g0, bound0, strictness);
    checks.push_back({"initial_ball", g0, bound0, init_ok});
    res.certificate.initial_ok = init_ok;

    if (res.feasibility.feasible()) {
        res.certificate.status = CertStatus::CertifiedClosedForm;
    } else {
        res.certificate.status = CertStatus::Refuted;
        res.certificate.failed_constraint = res.feasibility.first_failure()->name;
    }
    return res;
}

namespace {

double residual(const NonlinearityBound& bound, const DissipationProfile& gamma,
                const Envelope& env, double t) {
    const double b = env.bound(t);
    return b * (gamma.value(t) - env.log_derivative(t)) - bound.alpha(t, b) - bound.beta(t);
}

// magnitude of the residual's constituent terms, for an ulp-level floor
double residual_scale(const NonlinearityBound& bound, const DissipationProfile& gamma,
                      const Envelope& env, double t) {
    const double b = env.bound(t);
    return b * (std::abs(gamma.value(t)) + std::abs(env.log_derivative(t))) +
           std::abs(bound.alpha(t, b)) + std::abs(bound.beta(t));
}

}  // namespace

Certificate certify_grid(const NonlinearityBound& bound, const DissipationProfile& gamma,
                         const Envelope& env, double g0, double horizon, int n_points,
                         bool refine, Strictness strictness) {
    if (!(horizon > 0.0)) throw std::invalid_argument("certify_grid: horizon must be positive");
    if (n_points < 2) throw std::invalid_argument("certify_grid: need at least 2 grid points");
    if (!(g0 >= 0.0)) throw std::invalid_argument("g0 must be nonnegative");
    if (gamma.max_time() < horizon || env.max_time() < horizon)
        throw std::invalid_argument("certify_grid: horizon exceeds a tabulated span");

    Certificate cert;
    cert.envelope = env;
    cert.strictness = strictness;
    cert.sampled = true;

    // log-spaced in 1+t: envelopes and profiles vary on logarithmic timescales
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    const double span = std::log1p(horizon);
    for (int i = 0; i < n_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            std::expm1(span * static_cast<double>(i) / static_cast<double>(n_points - 1));
    grid.front() = 0.0;
    grid.back() = horizon;

    auto evaluate_min = [&](const std::vector<double>& ts, double& tmin) {
        double mmin = std::numeric_limits<double>::infinity();
        tmin = ts.front();
        for (double t : ts) {
            const double r = residual(bound, gamma, env, t);
            if (r < mmin) {
                mmin = r;
                tmin = t;
            }
        }
        return mmin;
    };

    double t_min = 0.0;
    double margin = evaluate_min(grid, t_min);

    constexpr double tol_refine = 1e-8;
    if (refine && margin >= 0.0 && margin < tol_refine) {
        for (int round = 0; round < 2; ++round) {
            auto it = std::lower_bound(grid.begin(), grid.end(), t_min);
            std::vector<double> extra;
            if (it != grid.begin()) extra.push_back(0.5 * (*(it - 1) + *it));
            if (it + 1 != grid.end()) extra.push_back(0.5 * (*it + *(it + 1)));
            for (double e : extra)
                grid.insert(std::lower_bound(grid.begin(), grid.end(), e), e);
            margin = evaluate_min(grid, t_min);
        }
    }

    cert.grid = grid;
    cert.margin_min = margin;
    cert.initial_ok = initial_holds(g0, env.bound(0.0), strictness);
    cert.witness_time = t_min;

    const double floor = kSlack * std::max(1.0, residual_scale(bound, gamma, env, t_min));
    if (margin < -floor) {
        cert.status = CertStatus::Refuted;
        cert.failed_constraint = "residual";
    } else if (!cert.initial_ok) {
        cert.status = CertStatus::Refuted;
        cert.failed_constraint = "initial_ball";
        cert.witness_time = 0.0;
    } else {
        cert.status = CertStatus::CertifiedGrid;
        cert.witness_time = std::numeric_limits<double>::quiet_NaN();
    }
    return cert;
}

OptimizedRate optimize_rate(const NonlinearityBound& bound, const DissipationProfile& gamma,
                            double g0) {
    if (!(g0 > 0.0)) throw std::invalid_argument("optimize_rate: g0 must be positive");
    if (!bound.is_power())
        throw std::invalid_argument("optimize_rate: requires a power majorant");
    if (gamma.kind() == DissipationProfile::Kind::Tabulated)
        throw std::invalid_argument("optimize_rate: tabulated profiles are not supported");

    const double lambda = 1.0 / g0;
    // saturating the initial-ball constraint (lambda = 1/g0) leaves the whole
    // dissipation budget minus c0*g0^(p-1) available as decay rate
    const double used = bound.c0() * std::pow(g0, bound.p() - 1.0);

    Envelope env = Envelope::exponential(1.0, 1.0);
    if (gamma.kind() == DissipationProfile::Kind::Constant) {
        const double b = gamma.kappa_abs() - used;
        if (!(b > 0.0))
            throw infeasibility_error(
                "rate_budget", "c0*g0^(p-1) >= kappa_abs: no positive decay rate is certifiable "
                               "from this initial norm");
        env = Envelope::exponential(lambda, b);
    } else {
        const double nu = gamma.c1() - used;
        if (!(nu > 0.0))
            throw infeasibility_error(
                "rate_budget",
                "c0*g0^(p-1) >= c1: no positive envelope exponent is certifiable");
        if (!leq(gamma.q(), (bound.p() - 1.0) * nu))
            throw infeasibility_error(
                "envelope_exponent",
                "(p-1)*nu >= q fails at the maximal nu; a smaller initial norm is required");
        env = Envelope::power_law(lambda, nu);
    }

    ClosedFormResult cf = certify_closed_form(bound, gamma, env, g0, Strictness::NonStrict);
    if (cf.certificate.status != CertStatus::CertifiedClosedForm)
        throw std::runtime_error("optimize_rate: saturated parameters failed to certify");
    return {env, cf.certificate, cf.feasibility};
}

}  // namespace decaycert
