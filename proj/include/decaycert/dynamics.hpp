// Finite-dimensional evolution systems du/dt = A(t)u + F(t,u): adaptive
// integration, norm trajectories, dissipativity and growth-exponent
// estimation, the Lyapunov-equation integral formula, and a gallery of
// built-in models.

#ifndef DECAYCERT_DYNAMICS_HPP
#define DECAYCERT_DYNAMICS_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decaycert/comparison.hpp"
#include "decaycert/ode.hpp"
#include "decaycert/scalar_model.hpp"

namespace decaycert {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Evolution system with optional declared scalar majorants. Construction
/// spot-checks the declarations on random probes: the nonlinearity must stay
/// inside alpha(t, ||u||) and the linear part must satisfy
/// Re<A(t)u, u> <= -gamma(t)||u||^2, both within relative slack 1e-9.
class System {
public:
    using MatrixFn = std::function<Matrix(double)>;
    using DiagonalFn = std::function<Vector(double)>;
    using NonlinearFn = std::function<Vector(double, const Vector&)>;

    static System dense(int dim, MatrixFn A, NonlinearFn F,
                        std::optional<NonlinearityBound> bound,
                        std::optional<DissipationProfile> gamma, std::string name = "");
    /// Diagonal linear part; keeps right-hand-side evaluation O(dim).
    static System diagonal(int dim, DiagonalFn diag, NonlinearFn F,
                           std::optional<NonlinearityBound> bound,
                           std::optional<DissipationProfile> gamma, std::string name = "");

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    bool linear() const { return !F_; }
    bool is_diagonal() const { return static_cast<bool>(diag_); }

    Matrix A(double t) const;
    Vector apply_A(double t, const Vector& u) const;
    Vector F(double t, const Vector& u) const;
    Vector rhs(double t, const Vector& u) const;

    const std::optional<NonlinearityBound>& declared_bound() const { return bound_; }
    const std::optional<DissipationProfile>& declared_gamma() const { return gamma_; }

    /// Copy with the nonlinearity dropped, for propagator and growth-exponent
    /// work on the linear part.
    System linear_part() const;

    /// Canonical initial state of norm g0, concentrated on the slowest
    /// declared direction of the model.
    Vector default_initial(double g0) const;
    int slow_index() const { return slow_index_; }
    System& set_slow_index(int i);

private:
    System() = default;
    void validate_declarations() const;

    int dim_ = 0;
    MatrixFn A_;
    DiagonalFn diag_;
    NonlinearFn F_;
    std::optional<NonlinearityBound> bound_;
    std::optional<DissipationProfile> gamma_;
    std::string name_;
    int slow_index_ = 0;
};

/// State trajectory with dense output.
class VectorTrajectory {
public:
    explicit VectorTrajectory(std::shared_ptr<const ode::Solution<Vector>> sol, double rtol,
                              double atol);

    const std::vector<double>& times() const { return sol_->times; }
    const std::vector<Vector>& states() const { return sol_->states; }
    double t_end() const { return sol_->times.back(); }
    Vector at(double t) const { return sol_->at(t); }

    bool blew_up() const { return sol_->blew_up; }
    double blowup_time() const { return sol_->blowup_time; }
    double rtol() const { return rtol_; }
    double atol() const { return atol_; }
    const ode::StepStats& stats() const { return sol_->stats; }
    std::shared_ptr<const ode::Solution<Vector>> solution() const { return sol_; }

private:
    std::shared_ptr<const ode::Solution<Vector>> sol_;
    double rtol_, atol_;
};

VectorTrajectory integrate(const System& sys, const Vector& u0, double horizon,
                           double rtol = 1e-9, double atol = 1e-12);

/// Euclidean norm of the states; slopes at zeros of the norm are understood
/// as right-derivatives by downstream consumers.
ScalarTrajectory norm_trajectory(const VectorTrajectory& traj);

/// Largest eigenvalue of the Hermitian part (A + A*)/2 — the numerical
/// abscissa. Cross-checked by shifted power iteration with n_probes random
/// restarts (0 skips the cross-check).
double dissipativity_estimate(const Matrix& A, int n_probes = 3);

/// Largest real part of the spectrum.
double spectral_abscissa(const Matrix& A);

/// Solution operator U(t, s) of the linear problem, indexable anywhere in
/// the integrated range.
class Propagator {
public:
    Propagator(double source_time, std::shared_ptr<const ode::Solution<Matrix>> sol);
    double source_time() const { return source_; }
    double t_end() const { return sol_->times.back(); }
    Matrix at(double t) const { return sol_->at(t); }
    bool blew_up() const { return sol_->blew_up; }
    double blowup_time() const { return sol_->blowup_time; }

private:
    double source_;
    std::shared_ptr<const ode::Solution<Matrix>> sol_;
};

/// Integrates dU/dt = A(t)U, U(s,s) = I over [s, max(t_grid)].
Propagator propagator(const System& sys, double s, std::span<const double> t_grid,
                      double rtol = 1e-9, double atol = 1e-12);

/// Finite-horizon estimate of the upper growth exponent
/// limsup_{t,s} ln||U(t+s,s)|| / t: the slope at the largest offset in
/// t_list, maximized over the sources in s_list. A finite probe can only
/// approximate the limsup; larger probes tighten it.
double estimate_general_exponent(const System& sys, std::span<const double> s_list,
                                 std::span<const double> t_list, double rtol = 1e-9,
                                 double atol = 1e-12);

struct LyapunovSolution {
    Matrix W;
    double min_eigenvalue = 0.0;
    double residual = 0.0;  // ||A*W + WA + 2V|| relative to ||W||
};

/// Solves A*W + WA = -2V for Hermitian positive-definite W through the
/// integral formula W = 2 int_0^inf e^{A*t} V e^{At} dt, truncated once the
/// integrand norm falls below 1e-14. Requires spectral_abscissa(A) < 0 and
/// V Hermitian positive-definite.
LyapunovSolution lyapunov_solve(const Matrix& A, const Matrix& V);

struct GalleryParams {
    std::map<std::string, double> scalars;
    std::vector<double> rates;  // "diagonal" only
};

struct GalleryEntry {
    std::string name;
    std::string description;
    std::string params;
};

/// Built-in models: "counterexample" {a, b}, "diagonal" {rates},
/// "remark2" {K, L, c0, p, c1, q, phase}.
System gallery(const std::string& name, const GalleryParams& params = {});
const std::vector<GalleryEntry>& gallery_catalog();

}  // namespace decaycert

#endif
