// Decay certificates: closed-form parameter selection for the exponential and
// power-law envelope families, sampled verification of the governing
// differential inequality for arbitrary envelopes, and search for the
// tightest certifiable rate.

#ifndef DECAYCERT_CERTIFIER_HPP
#define DECAYCERT_CERTIFIER_HPP

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaycert/scalar_model.hpp"

namespace decaycert {

enum class CertStatus { CertifiedClosedForm, CertifiedGrid, Refuted, Inconclusive };
enum class Strictness { Strict, NonStrict };

std::string to_string(CertStatus s);
std::string to_string(Strictness s);

/// Thrown when no admissible envelope parameters exist; carries the name of
/// the binding constraint.
class infeasibility_error : public std::runtime_error {
public:
    infeasibility_error(std::string constraint, const std::string& what)
        : std::runtime_error(what), constraint_(std::move(constraint)) {}
    const std::string& constraint() const { return constraint_; }

private:
    std::string constraint_;
};

/// Outcome of checking the envelope inequality
///   alpha(t, 1/mu) + beta <= (1/mu) * (gamma - dot(mu)/mu)
/// together with the initial condition g(0) vs 1/mu(0).
struct Certificate {
    Envelope envelope = Envelope::exponential(1.0, 1.0);
    CertStatus status = CertStatus::Inconclusive;
    /// Minimum over the check grid of RHS - LHS; NaN for closed-form paths.
    double margin_min = std::numeric_limits<double>::quiet_NaN();
    /// Time points checked (empty for closed-form certificates).
    std::vector<double> grid;
    bool initial_ok = false;
    Strictness strictness = Strictness::NonStrict;
    /// Grid certificates are sampled, not interval-rigorous.
    bool sampled = false;
    /// Name of the first failing constraint, or the refutation witness.
    std::string failed_constraint;
    double witness_time = std::numeric_limits<double>::quiet_NaN();

    bool certified() const {
        return status == CertStatus::CertifiedClosedForm || status == CertStatus::CertifiedGrid;
    }
};

struct ConstraintCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

struct FeasibilityReport {
    std::vector<ConstraintCheck> constraints;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    /// b (exponential family) or nu (power-law family).
    double rate = std::numeric_limits<double>::quiet_NaN();

    bool feasible() const;
    const ConstraintCheck* first_failure() const;
};

struct ClosedFormResult {
    Certificate certificate;
    FeasibilityReport feasibility;
};

struct ExponentialRate { double lambda; double b; };
struct PowerLawRate { double lambda; double nu; };

/// lambda = (c0/eps)^(1/(p-1)), b = kappa_abs - eps; saturates the rate
/// budget c0/lambda^(p-1) + b <= kappa_abs with equality.
ExponentialRate exponential_params(double c0, double p, double kappa_abs, double eps);

/// lambda = (c0/eps)^(1/(p-1)), nu = c1 - eps; requires (p-1)(c1-eps) >= q.
PowerLawRate powerlaw_params(double c0, double p, double c1, double q, double eps);

/// Checks the finitely many scalar constraints that make the given envelope
/// valid for a power majorant with zero forcing. Family mismatches yield an
/// Inconclusive certificate; use certify_grid for those.
ClosedFormResult certify_closed_form(const NonlinearityBound& bound,
                                     const DissipationProfile& gamma,
                                     const Envelope& env, double g0,
                                     Strictness strictness = Strictness::NonStrict);

/// Samples the inequality residual on a log-spaced grid over [0, horizon].
/// The certificate is explicitly marked as sampled rather than rigorous.
Certificate certify_grid(const NonlinearityBound& bound, const DissipationProfile& gamma,
                         const Envelope& env, double g0, double horizon, int n_points,
                         bool refine = true, Strictness strictness = Strictness::NonStrict);

struct OptimizedRate {
    Envelope envelope;
    Certificate certificate;
    FeasibilityReport feasibility;
};

/// Pins lambda = 1/g0 and saturates the rate budget, which maximizes the
/// certified decay rate for the given initial norm. Throws
/// infeasibility_error when no positive rate survives.
OptimizedRate optimize_rate(const NonlinearityBound& bound, const DissipationProfile& gamma,
                            double g0);

}  // namespace decaycert

#endif
