#include "decaycert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace decaycert {

namespace {

constexpr double kDeclarationSlack = 1e-9;

Vector random_state(std::mt19937& rng, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> logmag(-3.0, 3.0);
    Vector u(dim);
    for (int i = 0; i < dim; ++i) u(i) = Complex(normal(rng), normal(rng));
    const double target = std::pow(10.0, logmag(rng));
    const double n = u.norm();
    if (n > 0.0) u *= target / n;
    return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// System

System System::dense(int dim, MatrixFn A, NonlinearFn F, std::optional<NonlinearityBound> bound,
                     std::optional<DissipationProfile> gamma, std::string name) {
    System s;
    s.dim_ = dim;
    s.A_ = std::move(A);
    s.F_ = std::move(F);
    s.bound_ = std::move(bound);
    s.gamma_ = std::move(gamma);
    s.name_ = std::move(name);
    if (s.dim_ <= 0) throw std::invalid_argument("System: dimension must be positive");
    if (!s.A_) throw std::invalid_argument("System: missing coefficient map");
    s.validate_declarations();
    return s;
}

System System::diagonal(int dim, DiagonalFn diag, NonlinearFn F,
                        std::optional<NonlinearityBound> bound,
                        std::optional<DissipationProfile> gamma, std::string name) {
    System s;
    s.dim_ = dim;
    s.diag_ = std::move(diag);
    s.F_ = std::move(F);
    s.bound_ = std::move(bound);
    s.gamma_ = std::move(gamma);
    s.name_ = std::move(name);
    if (s.dim_ <= 0) throw std::invalid_argument("System: dimension must be positive");
    if (!s.diag_) throw std::invalid_argument("System: missing coefficient map");
    s.validate_declarations();
    return s;
}

Matrix System::A(double t) const {
    if (diag_) return Matrix(diag_(t).asDiagonal());
    return A_(t);
}

Vector System::apply_A(double t, const Vector& u) const {
    if (diag_) return diag_(t).cwiseProduct(u);
    return A_(t) * u;
}

Vector System::F(double t, const Vector& u) const {
    if (!F_) return Vector::Zero(dim_);
    return F_(t, u);
}

Vector System::rhs(double t, const Vector& u) const {
    Vector r = apply_A(t, u);
    if (F_) r += F_(t, u);
    return r;
}

System System::linear_part() const {
    System s = *this;
    s.F_ = nullptr;
    s.bound_.reset();
    return s;
}

Vector System::default_initial(double g0) const {
    if (!(g0 >= 0.0)) throw std::invalid_argument("default_initial: g0 must be nonnegative");
    Vector u = Vector::Zero(dim_);
    u(slow_index_) = g0;
    return u;
}

System& System::set_slow_index(int i) {
    if (i < 0 || i >= dim_) throw std::invalid_argument("set_slow_index: index out of range");
    slow_index_ = i;
    return *this;
}

void System::validate_declarations() const {
    if (!bound_ && !gamma_) return;
    std::mt19937 rng(0x5eedu);
    std::uniform_real_distribution<double> time_draw(0.0, 10.0);
    const double t_max = gamma_ ? std::min(10.0, gamma_->max_time()) : 10.0;
    for (int probe = 0; probe < 16; ++probe) {
        const double t = time_draw(rng) / 10.0 * t_max;
        const Vector u = random_state(rng, dim_);
        const double n2 = u.squaredNorm();
        if (gamma_) {
            const double re = (u.dot(apply_A(t, u))).real();  // <u, Au> = (Au, u) conjugated
            if (re > (-gamma_->value(t) + kDeclarationSlack) * n2)
                throw std::invalid_argument(
                    "System: declared dissipation profile fails on a random probe");
        }
        if (bound_ && F_) {
            const double fn = F_(t, u).norm();
            const double cap = bound_->alpha(t, u.norm()) + bound_->beta(t);
            if (fn > cap * (1.0 + kDeclarationSlack) + 1e-300)
                throw std::invalid_argument(
                    "System: declared nonlinearity bound fails on a random probe");
        }
    }
}

// ---------------------------------------------------------------------------
// Integration

VectorTrajectory::VectorTrajectory(std::shared_ptr<const ode::Solution<Vector>> sol, double rtol,
                                   double atol)
    : sol_(std::move(sol)), rtol_(rtol), atol_(atol) {}

VectorTrajectory integrate(const System& sys, const Vector& u0, double horizon, double rtol,
                           double atol) {
    if (u0.size() != sys.dim())
        throw std::invalid_argument("integrate: initial state has wrong dimension");
    if (!std::isfinite(u0.norm()))
        throw std::invalid_argument("integrate: initial state must be finite");
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");

    auto rhs = [&sys](double t, const Vector& u) { return sys.rhs(t, u); };
    ode::Options opts;
    opts.rtol = rtol;
    opts.atol = atol;
    auto sol = ode::integrate_dopri5(rhs, 0.0, Vector(u0), horizon, opts);
    return VectorTrajectory(std::make_shared<const ode::Solution<Vector>>(std::move(sol)), rtol,
                            atol);
}

ScalarTrajectory norm_trajectory(const VectorTrajectory& traj) {
    return ScalarTrajectory::from_norm<Vector>(traj.solution(), traj.rtol(), traj.atol());
}

// ---------------------------------------------------------------------------
// Spectral quantities

double dissipativity_estimate(const Matrix& A, int n_probes) {
    if (A.rows() != A.cols()) throw std::invalid_argument("dissipativity_estimate: square matrix required");
    const Matrix H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const double lam = es.eigenvalues().maxCoeff();

    if (n_probes > 0) {
        // shifted power iteration; the Gershgorin-style shift makes the
        // algebraically largest eigenvalue also the dominant one
        const double shift = H.cwiseAbs().rowwise().sum().maxCoeff();
        std::mt19937 rng(0xab5c155au);
        double best = -std::numeric_limits<double>::infinity();
        for (int probe = 0; probe < n_probes; ++probe) {
            Vector x = random_state(rng, static_cast<int>(H.rows()));
            x.normalize();
            double q_prev = std::numeric_limits<double>::infinity();
            for (int it = 0; it < 20000; ++it) {
                Vector y = H * x + shift * x;
                const double yn = y.norm();
                if (yn == 0.0) break;
                x = y / yn;
                const double q = (x.dot(H * x)).real();
                if (std::abs(q - q_prev) < 1e-13 * std::max(1.0, std::abs(q))) {
                    q_prev = q;
                    break;
                }
                q_prev = q;
            }
            best = std::max(best, q_prev);
        }
        if (std::abs(best - lam) > 1e-6 * std::max(1.0, std::abs(lam)))
            throw std::runtime_error(
                "dissipativity_estimate: power-iteration cross-check disagrees with the "
                "eigensolver");
    }
    return lam;
}

double spectral_abscissa(const Matrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("spectral_abscissa: square matrix required");
    Eigen::ComplexEigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

// ---------------------------------------------------------------------------
// Propagator and growth exponent

Propagator::Propagator(double source_time, std::shared_ptr<const ode::Solution<Matrix>> sol)
    : source_(source_time), sol_(std::move(sol)) {}

Propagator propagator(const System& sys, double s, std::span<const double> t_grid, double rtol,
                      double atol) {
    if (!sys.linear())
        throw std::invalid_argument("propagator: defined for linear systems only");
    if (t_grid.empty()) throw std::invalid_argument("propagator: empty time grid");
    const double t_end = *std::max_element(t_grid.begin(), t_grid.end());
    if (t_end < s) throw std::invalid_argument("propagator: grid ends before the source time");

    auto rhs = [&sys](double t, const Matrix& U) -> Matrix { return sys.A(t) * U; };
    ode::Options opts;
    opts.rtol = rtol;
    opts.atol = atol;
    Matrix U0 = Matrix::Identity(sys.dim(), sys.dim());
    auto sol = ode::integrate_dopri5(rhs, s, std::move(U0), t_end, opts);
    return Propagator(s, std::make_shared<const ode::Solution<Matrix>>(std::move(sol)));
}

double estimate_general_exponent(const System& sys, std::span<const double> s_list,
                                 std::span<const double> t_list, double rtol, double atol) {
    if (s_list.empty() || t_list.empty())
        throw std::invalid_argument("estimate_general_exponent: empty probe lists");
    const double T = *std::max_element(t_list.begin(), t_list.end());
    if (!(T > 0.0)) throw std::invalid_argument("estimate_general_exponent: offsets must be positive");

    double best = -std::numeric_limits<double>::infinity();
    for (double s : s_list) {
        const double target[] = {s + T};
        Propagator P = propagator(sys, s, target, rtol, atol);
        double t_at = s + T, horizon = T;
        if (P.blew_up()) {  // exponent read off at the escape time instead
            t_at = P.blowup_time();
            horizon = t_at - s;
        }
        const Matrix U = P.at(t_at);
        const double opnorm = U.jacobiSvd().singularValues()(0);
        best = std::max(best, std::log(opnorm) / horizon);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Lyapunov equation

LyapunovSolution lyapunov_solve(const Matrix& A, const Matrix& V) {
    const auto n = A.rows();
    if (A.cols() != n || V.rows() != n || V.cols() != n)
        throw std::invalid_argument("lyapunov_solve: dimension mismatch");
    if ((V - V.adjoint()).norm() > 1e-12 * std::max(1.0, V.norm()))
        throw std::invalid_argument("lyapunov_solve: V must be Hermitian");
    {
        Eigen::SelfAdjointEigenSolver<Matrix> vs(V);
        if (!(vs.eigenvalues().minCoeff() > 0.0))
            throw std::invalid_argument("lyapunov_solve: V must be positive-definite");
    }
    const double sigma = spectral_abscissa(A);
    if (!(sigma < 0.0))
        throw std::domain_error("lyapunov_solve: spectral abscissa must be negative");

    // Integrate X' = A*X + XA (the integrand, X(0)=V) together with the
    // running integral W' = 2X, stacked as [X; W]. The adaptive stepper is
    // the quadrature; extend until ||X|| < 1e-14.
    constexpr double kTail = 1e-14;
    auto rhs = [&A, n](double, const Matrix& S) {
        Matrix d(2 * n, n);
        const auto X = S.topRows(n);
        d.topRows(n) = A.adjoint() * X + X * A;
        d.bottomRows(n) = 2.0 * X;
        return d;
    };
    Matrix S0(2 * n, n);
    S0.topRows(n) = V;
    S0.bottomRows(n) = Matrix::Zero(n, n);

    ode::Options opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-15;
    opts.store_dense = false;
    double t_end = std::log(std::max(V.norm(), 1.0) / kTail) / (2.0 * -sigma) + 1.0;
    Matrix S = std::move(S0);
    double t0 = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto sol = ode::integrate_dopri5(rhs, t0, std::move(S), t_end, opts);
        S = sol.states.back();
        if (S.topRows(n).norm() < kTail) break;
        t0 = t_end;
        t_end *= 2.0;
    }
    if (S.topRows(n).norm() >= kTail)
        throw std::runtime_error("lyapunov_solve: integrand failed to decay; "
                                 "transient growth may be too strong");

    LyapunovSolution out;
    out.W = 0.5 * (S.bottomRows(n) + S.bottomRows(n).adjoint().eval());
    const double res = (A.adjoint() * out.W + out.W * A + 2.0 * V).norm();
    out.residual = res / out.W.norm();
    if (!(res <= 1e-8 * out.W.norm()))
        throw std::runtime_error("lyapunov_solve: residual check failed");
    Eigen::SelfAdjointEigenSolver<Matrix> ws(out.W);
    out.min_eigenvalue = ws.eigenvalues().minCoeff();
    if (!(out.min_eigenvalue > 0.0))
        throw std::runtime_error("lyapunov_solve: computed W is not positive-definite");
    return out;
}

// ---------------------------------------------------------------------------
// Gallery

namespace {

double take(const GalleryParams& p, const std::string& key, double fallback) {
    auto it = p.scalars.find(key);
    return it == p.scalars.end() ? fallback : it->second;
}

void reject_unknown(const GalleryParams& p, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : p.scalars) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end()) {
            throw std::invalid_argument("gallery: unknown parameter '" + key + "'");
        }
    }
}

System make_counterexample(const GalleryParams& p) {
    reject_unknown(p, {"a", "b"});
    const double a = take(p, "a", 1.0);
    const double b = take(p, "b", 5.0);
    Matrix A(2, 2);
    A << Complex(0.0), Complex(b), Complex(-a), Complex(-1.0);
    return System::dense(
        2, [A](double) { return A; }, nullptr, std::nullopt, std::nullopt, "counterexample");
}

System make_diagonal(const GalleryParams& p) {
    reject_unknown(p, {});
    if (p.rates.empty())
        throw std::invalid_argument("gallery: \"diagonal\" needs a non-empty rates list");
    const int dim = static_cast<int>(p.rates.size());
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = Complex(p.rates[static_cast<std::size_t>(i)]);
    const double rate_max = *std::max_element(p.rates.begin(), p.rates.end());
    std::optional<DissipationProfile> gamma;
    if (rate_max < 0.0) gamma = DissipationProfile::constant(-rate_max);
    System sys = System::diagonal(
        dim, [d](double) { return d; }, nullptr, std::nullopt, std::move(gamma), "diagonal");
    const auto slow = std::max_element(p.rates.begin(), p.rates.end()) - p.rates.begin();
    sys.set_slow_index(static_cast<int>(slow));
    return sys;
}

// Fourier truncation of gamma(t)(Laplacian - I) on the periodic box [0,L]^3,
// modes |k|_inf <= K: diagonal entries -gamma(t)(|2 pi k / L|^2 + 1). The
// k = 0 mode makes the declared profile tight. Nonlinearity is the
// worst-case aligned c0 ||u||^(p-1) u, optionally rotated by a phase.
System make_remark2(const GalleryParams& p) {
    reject_unknown(p, {"K", "L", "c0", "p", "c1", "q", "phase"});
    const int K = static_cast<int>(take(p, "K", 3.0));
    const double L = take(p, "L", 2.0 * std::numbers::pi);
    const double c0 = take(p, "c0", 1.0);
    const double pexp = take(p, "p", 3.0);
    const double c1 = take(p, "c1", 1.0);
    const double q = take(p, "q", 0.5);
    const double phase = take(p, "phase", 0.0);
    if (K < 0 || !(L > 0.0))
        throw std::invalid_argument("gallery: \"remark2\" needs K >= 0 and L > 0");

    const int side = 2 * K + 1;
    const int dim = side * side * side;
    Eigen::VectorXd symbol(dim);
    int slow = 0;
    int idx = 0;
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky)
            for (int kz = -K; kz <= K; ++kz, ++idx) {
                const double f = 2.0 * std::numbers::pi / L;
                symbol(idx) = f * f * (kx * kx + ky * ky + kz * kz) + 1.0;
                if (kx == 0 && ky == 0 && kz == 0) slow = idx;
            }

    auto gamma = DissipationProfile::power_law(c1, q);
    auto diag = [gamma, symbol](double t) {
        return Vector((-gamma.value(t) * symbol).cast<Complex>());
    };
    const Complex rot = std::polar(1.0, phase);
    auto F = [c0, pexp, rot](double, const Vector& u) {
        return Vector(c0 * std::pow(u.norm(), pexp - 1.0) * rot * u);
    };
    System sys = System::diagonal(dim, std::move(diag), std::move(F),
                                  NonlinearityBound::power(c0, pexp), std::move(gamma),
                                  "remark2");
    sys.set_slow_index(slow);
    return sys;
}

}  // namespace

System gallery(const std::string& name, const GalleryParams& params) {
    if (name == "counterexample") return make_counterexample(params);
    if (name == "diagonal") return make_diagonal(params);
    if (name == "remark2") return make_remark2(params);
    throw std::invalid_argument("gallery: unknown model '" + name + "'");
}

const std::vector<GalleryEntry>& gallery_catalog() {
    static const std::vector<GalleryEntry> entries = {
        {"counterexample",
         "2x2 matrix [[0, b], [-a, -1]]: spectrum in a stable half-plane while the "
         "Hermitian part has a positive eigenvalue",
         "a (default 1), b (default 5)"},
        {"diagonal", "constant diagonal system with the given decay rates", "rates (list)"},
        {"remark2",
         "spectral truncation of gamma(t)(Laplacian - I) on a periodic box with "
         "worst-case aligned power nonlinearity",
         "K (default 3), L (default 2*pi), c0 (default 1), p (default 3), c1 (default 1), "
         "q (default 0.5), phase (default 0)"},
    };
    return entries;
}

}  // namespace decaycert
