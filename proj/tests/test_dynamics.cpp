#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "decaycert/certifier.hpp"
#include "decaycert/dynamics.hpp"
#include "oracles.hpp"

using namespace decaycert;

namespace {

GalleryParams counterexample_params(double a, double b) {
    GalleryParams p;
    p.scalars = {{"a", a}, {"b", b}};
    return p;
}

GalleryParams diag_params(std::vector<double> rates) {
    GalleryParams p;
    p.rates = std::move(rates);
    return p;
}

Vector unit2(double x, double y) {
    Vector u(2);
    u << Complex(x), Complex(y);
    return u;
}

// random strictly dissipative constant matrix: numerical abscissa -kappa
Matrix shifted_dissipative(std::mt19937& rng, int dim, double kappa) {
    const Matrix M = oracles::random_matrix(rng, dim);
    const double omega = dissipativity_estimate(M, 0);
    return M - (omega + kappa) * Matrix::Identity(dim, dim);
}

}  // namespace

TEST_CASE("integrate: decoupled linear modes") {
    const System sys = gallery("diagonal", diag_params({-1.0, -2.0}));
    const auto traj = integrate(sys, unit2(1.0, 1.0), 5.0);
    const Vector u1 = traj.at(1.0);
    CHECK(std::abs(u1(0) - Complex(std::exp(-1.0))) <= 1e-9);
    CHECK(std::abs(u1(1) - Complex(std::exp(-2.0))) <= 1e-9);
    CHECK_FALSE(traj.blew_up());
}

TEST_CASE("integrate: counterexample matrix matches the matrix-exponential flow") {
    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    const Vector u0 = unit2(1.0, 0.0);
    const auto traj = integrate(sys, u0, 20.0);
    const Matrix A = sys.A(0.0);
    for (double t : {0.5, 1.0, 3.0, 7.0, 20.0}) {
        const Vector ref = oracles::matrix_exponential(A * t) * u0;
        CHECK((traj.at(t) - ref).norm() <= 1e-8);
    }
    // asymptotic decay at the spectral rate: ||u|| ~ e^{-t/2}
    CHECK(traj.at(20.0).norm() < 1e-3);
    CHECK(traj.at(20.0).norm() > 1e-6);
}

TEST_CASE("norm trajectory: rotation leaves the norm exact") {
    // u' = (-1 + i) u in each coordinate keeps ||u|| = e^{-t}
    auto diag = [](double) {
        Vector d(2);
        d << Complex(-1.0, 1.0), Complex(-1.0, -1.0);
        return d;
    };
    const System sys = System::diagonal(2, diag, nullptr, std::nullopt,
                                        DissipationProfile::constant(1.0), "rotating");
    const auto traj = integrate(sys, unit2(std::sqrt(0.5), std::sqrt(0.5)), 8.0);
    const auto g = norm_trajectory(traj);
    for (std::size_t i = 0; i < g.times().size(); ++i)
        CHECK(g.values()[i] == doctest::Approx(std::exp(-g.times()[i])).epsilon(1e-8));
    CHECK(g.value_at(3.21) == doctest::Approx(std::exp(-3.21)).epsilon(1e-8));
}

TEST_CASE("norm trajectory: stays nonnegative through coordinate zero-crossings") {
    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    const auto coarse = norm_trajectory(integrate(sys, unit2(1.0, 0.0), 15.0, 1e-9, 1e-12));
    const auto fine = norm_trajectory(integrate(sys, unit2(1.0, 0.0), 15.0, 1e-12, 1e-14));
    for (int i = 0; i <= 300; ++i) {
        const double t = 15.0 * i / 300.0;
        CHECK(coarse.value_at(t) >= 0.0);
        CHECK(std::abs(coarse.value_at(t) - fine.value_at(t)) <= 1e-7);
    }
}

TEST_CASE("dissipativity estimate: diagonal and counterexample Hermitian parts") {
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = -2.0;
    CHECK(dissipativity_estimate(D) == doctest::Approx(-1.0).epsilon(1e-12));

    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    // A_R = [[0, 2], [2, -1]]; char. polynomial x^2 + x - 4 by hand
    const double by_hand = (-1.0 + std::sqrt(17.0)) / 2.0;
    const double est = dissipativity_estimate(sys.A(0.0), 5);
    CHECK(est == doctest::Approx(by_hand).epsilon(1e-12));
    CHECK(est == doctest::Approx(1.5615528128088303).epsilon(1e-12));
    CHECK(est > 0.0);
}

TEST_CASE("dissipativity estimate: tightest mode of the truncated diffusion model") {
    GalleryParams p;
    p.scalars = {{"K", 2.0}};
    const System sys = gallery("remark2", p);
    // gamma(0) = 1: the k = 0 mode gives exactly -1
    CHECK(dissipativity_estimate(sys.A(0.0)) == doctest::Approx(-1.0).epsilon(1e-12));
    const double g3 = 1.0 / std::sqrt(4.0);  // gamma(3) = (1+3)^{-1/2}
    CHECK(dissipativity_estimate(sys.A(3.0)) == doctest::Approx(-g3).epsilon(1e-12));
}

TEST_CASE("spectral abscissa: counterexample spectrum sits at -1/2") {
    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    CHECK(spectral_abscissa(sys.A(0.0)) == doctest::Approx(-0.5).epsilon(1e-9));

    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = -2.0;
    CHECK(spectral_abscissa(D) == doctest::Approx(-1.0).epsilon(1e-12));

    // boundary ab = 0.25: double eigenvalue -1/2 from (x)(x+1) + ab = 0
    const System bd = gallery("counterexample", counterexample_params(0.5, 0.5));
    CHECK(spectral_abscissa(bd.A(0.0)) == doctest::Approx(-0.5).epsilon(1e-7));
}

TEST_CASE("the spectrum/numerical-range gap of the counterexample") {
    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    const Matrix A = sys.A(0.0);
    CHECK(std::abs(spectral_abscissa(A) + 0.5) <= 1e-9);
    CHECK(dissipativity_estimate(A) > 0.0);
    // (A_R u, u) at u = (1/2, 1/2), by hand: 0.75
    const Matrix H = 0.5 * (A + A.adjoint());
    const Vector u = unit2(0.5, 0.5);
    CHECK(std::abs((u.dot(H * u)).real() - 0.75) <= 1e-12);
}

TEST_CASE("propagator: identity at the source time, matrix exponential for constant A") {
    std::mt19937 rng(11u);
    const Matrix A = shifted_dissipative(rng, 3, 0.4);
    const System sys = System::dense(3, [A](double) { return A; }, nullptr, std::nullopt,
                                     std::nullopt, "random-linear");
    const double grid[] = {0.0, 2.5, 6.0};
    const Propagator P = propagator(sys, 0.0, grid);
    CHECK((P.at(0.0) - Matrix::Identity(3, 3)).norm() <= 1e-10);
    for (double t : {0.7, 2.5, 6.0}) {
        const Matrix ref = oracles::matrix_exponential(A * t);
        CHECK((P.at(t) - ref).norm() <= 1e-8);
    }
}

TEST_CASE("propagator: diagonal time-dependent coefficients integrate the profile") {
    const auto gamma = DissipationProfile::power_law(1.0, 0.5);
    auto diag = [gamma](double t) {
        Vector d(2);
        d << Complex(-gamma.value(t)), Complex(-3.0 * gamma.value(t));
        return d;
    };
    const System sys = System::diagonal(2, diag, nullptr, std::nullopt, gamma, "damped");
    const double grid[] = {4.0};
    const Propagator P = propagator(sys, 0.0, grid);
    for (double t : {1.0, 2.7, 4.0}) {
        const double a = gamma.integrating_factor(t);
        const Matrix U = P.at(t);
        CHECK(std::abs(U(0, 0) - Complex(1.0 / a)) <= 1e-9);
        CHECK(std::abs(U(1, 1) - Complex(std::pow(a, -3.0))) <= 1e-9);
        CHECK(std::abs(U(0, 1)) <= 1e-12);
    }
}

TEST_CASE("propagator: cocycle identity on gallery systems") {
    std::mt19937 rng(211u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    GalleryParams small_remark2;
    small_remark2.scalars = {{"K", 1.0}};
    const System systems[] = {gallery("counterexample", counterexample_params(1.0, 5.0)),
                              gallery("diagonal", diag_params({-0.3, -1.0, -2.5})),
                              gallery("remark2", small_remark2).linear_part()};
    for (const System& sys : systems) {
        for (int k = 0; k < 3; ++k) {
            double s = 4.0 * U(rng), r = s + 0.5 + 3.0 * U(rng), t = r + 0.5 + 2.0 * U(rng);
            const double g1[] = {t}, g2[] = {t}, g3[] = {r};
            const Matrix Uts = propagator(sys, s, g1).at(t);
            const Matrix Utr = propagator(sys, r, g2).at(t);
            const Matrix Urs = propagator(sys, s, g3).at(r);
            CHECK((Uts - Utr * Urs).norm() <= 1e-6);
        }
    }
}

TEST_CASE("growth exponent: dominant mode of a constant diagonal system") {
    const System sys = gallery("diagonal", diag_params({-1.0, -2.0}));
    const double ss[] = {0.0, 5.0};
    const double ts[] = {10.0, 20.0};
    const double kappa_hat = estimate_general_exponent(sys, ss, ts);
    CHECK(kappa_hat == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("growth exponent: counterexample decays at the spectral rate") {
    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    const double ss[] = {0.0};
    const double ts[] = {40.0};
    const double kappa_hat = estimate_general_exponent(sys, ss, ts);
    CHECK(std::abs(kappa_hat + 0.5) <= 0.05);
}

TEST_CASE("growth exponent: power-law damping escapes any negative exponent") {
    const auto gamma = DissipationProfile::power_law(1.0, 0.5);
    auto diag = [gamma](double t) {
        Vector d(2);
        d << Complex(-gamma.value(t)), Complex(-gamma.value(t));
        return d;
    };
    const System sys = System::diagonal(2, diag, nullptr, std::nullopt, gamma, "damped-identity");
    const double ss[] = {0.0, 100.0, 500.0};
    const double ts[] = {50.0, 200.0};
    const double kappa_hat = estimate_general_exponent(sys, ss, ts);
    // closed form: slope(s) = -2 (sqrt(1+s+200) - sqrt(1+s)) / 200, max at s = 500
    const double ref = -2.0 * (std::sqrt(701.0) - std::sqrt(501.0)) / 200.0;
    CHECK(kappa_hat == doctest::Approx(ref).epsilon(1e-4));
    CHECK(kappa_hat >= -0.05);
    CHECK(kappa_hat < 0.0);
}

TEST_CASE("growth exponent: expanding systems report the escape-rate estimate") {
    const System sys = gallery("diagonal", diag_params({1.0}));
    const double ss[] = {0.0};
    const double ts[] = {40.0};  // e^40 overflows the blow-up threshold
    const double kappa_hat = estimate_general_exponent(sys, ss, ts);
    CHECK(kappa_hat == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("lyapunov solve: identity cases") {
    const Matrix I2 = Matrix::Identity(2, 2);
    const auto sol = lyapunov_solve(-I2, I2);
    CHECK((sol.W - I2).norm() <= 1e-9);
    CHECK(sol.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-8));

    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = -2.0;
    const auto sd = lyapunov_solve(D, I2);
    CHECK(std::abs(sd.W(0, 0) - Complex(1.0)) <= 1e-9);
    CHECK(std::abs(sd.W(1, 1) - Complex(0.5)) <= 1e-9);
}

TEST_CASE("lyapunov solve: counterexample matrix against the direct Sylvester solve") {
    const System sys = gallery("counterexample", counterexample_params(1.0, 5.0));
    const Matrix A = sys.A(0.0);
    const Matrix V = Matrix::Identity(2, 2);
    const auto sol = lyapunov_solve(A, V);
    CHECK(sol.residual <= 1e-8);
    CHECK(sol.min_eigenvalue > 0.0);
    const Matrix ref = oracles::sylvester_solve(A, V);
    CHECK((sol.W - ref).norm() <= 1e-7 * ref.norm());
}

TEST_CASE("lyapunov solve: rejects unstable A and bad V") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 0.1;
    A(1, 1) = -1.0;
    CHECK_THROWS_AS(lyapunov_solve(A, Matrix::Identity(2, 2)), std::domain_error);

    Matrix V = Matrix::Identity(2, 2);
    V(0, 1) = Complex(0.0, 0.3);  // not Hermitian
    CHECK_THROWS_AS(lyapunov_solve(-Matrix::Identity(2, 2), V), std::invalid_argument);
    Matrix Vneg = -Matrix::Identity(2, 2);
    CHECK_THROWS_AS(lyapunov_solve(-Matrix::Identity(2, 2), Vneg), std::invalid_argument);
}

TEST_CASE("gallery: remark2 symbol structure and declared profiles") {
    GalleryParams p;
    p.scalars = {{"K", 3.0}};
    const System sys = gallery("remark2", p);
    CHECK(sys.dim() == 343);
    CHECK(sys.is_diagonal());
    REQUIRE(sys.declared_gamma().has_value());
    CHECK(sys.declared_gamma()->kind() == DissipationProfile::Kind::PowerLaw);
    CHECK(sys.declared_gamma()->c1() == 1.0);
    CHECK(sys.declared_gamma()->q() == 0.5);
    REQUIRE(sys.declared_bound().has_value());
    CHECK(sys.declared_bound()->c0() == 1.0);
    CHECK(sys.declared_bound()->p() == 3.0);

    // worst-case aligned nonlinearity saturates ||F|| = c0 ||u||^p
    std::mt19937 rng(7u);
    for (int k = 0; k < 5; ++k) {
        const Vector u = 0.4 * oracles::random_unit_vector(rng, sys.dim());
        CHECK(sys.F(1.0, u).norm() ==
              doctest::Approx(std::pow(u.norm(), 3.0)).epsilon(1e-12));
    }
    // default initial state lives on the k = 0 mode, where A(t) acts as -gamma(t)
    const Vector u0 = sys.default_initial(0.1);
    CHECK(u0.norm() == doctest::Approx(0.1).epsilon(1e-15));
    const Vector Au = sys.apply_A(2.0, u0);
    const double g2 = sys.declared_gamma()->value(2.0);
    CHECK((Au + g2 * u0).norm() <= 1e-14);
}

TEST_CASE("gallery: rotated nonlinearity still satisfies the declared bound") {
    GalleryParams p;
    p.scalars = {{"K", 1.0}, {"phase", 1.2}};
    const System sys = gallery("remark2", p);
    std::mt19937 rng(8u);
    const Vector u = 0.3 * oracles::random_unit_vector(rng, sys.dim());
    CHECK(sys.F(0.0, u).norm() == doctest::Approx(std::pow(u.norm(), 3.0)).epsilon(1e-12));
    // not aligned with u
    const Vector f = sys.F(0.0, u);
    CHECK(std::abs((u.dot(f)).real()) < u.norm() * f.norm() * 0.9);
}

TEST_CASE("gallery: usage errors") {
    CHECK_THROWS_AS(gallery("no-such-model"), std::invalid_argument);
    GalleryParams typo;
    typo.scalars = {{"kappa", 1.0}};
    CHECK_THROWS_AS(gallery("counterexample", typo), std::invalid_argument);
    CHECK_THROWS_AS(gallery("diagonal"), std::invalid_argument);
    CHECK(gallery_catalog().size() == 3);
}

TEST_CASE("system declaration probes reject false claims") {
    // F twice as large as declared
    auto big_F = [](double, const Vector& u) { return Vector(2.0 * u.norm() * u); };
    CHECK_THROWS_AS(System::dense(
                        2, [](double) { return Matrix(-Matrix::Identity(2, 2)); }, big_F,
                        NonlinearityBound::power(1.0, 2.0), std::nullopt, "overclaimed"),
                    std::invalid_argument);
    // A not dissipative at the declared strength
    CHECK_THROWS_AS(System::dense(
                        2, [](double) { return Matrix(-0.2 * Matrix::Identity(2, 2)); }, nullptr,
                        std::nullopt, DissipationProfile::constant(1.0), "overclaimed"),
                    std::invalid_argument);
}

TEST_CASE("linear exactness: integrate matches the matrix exponential") {
    std::mt19937 rng(99u);
    for (int draw = 0; draw < 10; ++draw) {
        const int dim = 2 + static_cast<int>(rng() % 4);
        const Matrix A = shifted_dissipative(rng, dim, 0.3);
        const System sys = System::dense(dim, [A](double) { return A; }, nullptr, std::nullopt,
                                         std::nullopt, "linear");
        const Vector u0 = oracles::random_unit_vector(rng, dim);
        const double rtol = 1e-9;
        const auto traj = integrate(sys, u0, 10.0, rtol, 1e-13);
        for (double t : {1.0, 5.0, 10.0}) {
            const Vector ref = oracles::matrix_exponential(A * t) * u0;
            CHECK((traj.at(t) - ref).norm() <= 10.0 * rtol);
        }
    }
}

TEST_CASE("property: exponential-envelope dominance for constant dissipation") {
    std::mt19937 rng(0x12e2u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int draw = 0; draw < 25; ++draw) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        const double kappa = 0.2 + 2.8 * U(rng);
        const double c0 = 0.1 + 4.9 * U(rng);
        const double p = 1.05 + 2.95 * U(rng);
        const Matrix A = shifted_dissipative(rng, dim, kappa);
        auto F = [c0, p](double, const Vector& u) {
            return Vector(c0 * std::pow(u.norm(), p - 1.0) * u);
        };
        const System sys =
            System::dense(dim, [A](double) { return A; }, F, NonlinearityBound::power(c0, p),
                          DissipationProfile::constant(kappa), "draw");
        const double g0 =
            (0.05 + 0.85 * U(rng)) * std::pow(kappa / c0, 1.0 / (p - 1.0));
        const auto opt = optimize_rate(*sys.declared_bound(), *sys.declared_gamma(), g0);
        const Vector u0 = g0 * oracles::random_unit_vector(rng, dim);
        const auto traj = integrate(sys, u0, 30.0);
        REQUIRE_FALSE(traj.blew_up());
        const auto rep = verify_envelope(norm_trajectory(traj), opt.envelope,
                                         *sys.declared_gamma());
        CHECK(rep.pass);
    }
}

TEST_CASE("property: power-law-envelope dominance for vanishing dissipation") {
    std::mt19937 rng(0x14e4u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int done = 0;
    while (done < 25) {
        const double c1 = 0.3 + 2.7 * U(rng);
        const double q = U(rng);
        const double c0 = 0.1 + 4.9 * U(rng);
        const double p = 1.05 + 2.95 * U(rng);
        if (c1 - q / (p - 1.0) <= 1e-3) continue;
        const double eps = (c1 - q / (p - 1.0)) * (0.05 + 0.9 * U(rng));
        const auto rate = powerlaw_params(c0, p, c1, q, eps);
        const auto gamma = DissipationProfile::power_law(c1, q);

        const int dim = 2 + static_cast<int>(rng() % 5);
        Eigen::VectorXd depth(dim);
        depth(0) = 1.0;  // slowest direction decays exactly like gamma
        for (int i = 1; i < dim; ++i) depth(i) = 1.0 + 5.0 * U(rng);
        auto diag = [gamma, depth](double t) {
            return Vector((-gamma.value(t) * depth).cast<Complex>());
        };
        auto F = [c0, p](double, const Vector& u) {
            return Vector(c0 * std::pow(u.norm(), p - 1.0) * u);
        };
        const System sys = System::diagonal(dim, diag, F, NonlinearityBound::power(c0, p),
                                            gamma, "draw");
        const double g0 = (0.05 + 0.9 * U(rng)) / rate.lambda;
        const Vector u0 = g0 * oracles::random_unit_vector(rng, dim);
        const auto traj = integrate(sys, u0, 50.0);
        REQUIRE_FALSE(traj.blew_up());
        const auto env = Envelope::power_law(rate.lambda, rate.nu);
        CHECK(verify_envelope(norm_trajectory(traj), env, gamma).pass);
        ++done;
    }
}

TEST_CASE("scalar majorization: the norm never exceeds the extremal solution") {
    std::mt19937 rng(0x5ca1a2u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int draw = 0; draw < 10; ++draw) {
        const int dim = 2 + static_cast<int>(rng() % 4);
        const double kappa = 0.3 + 2.0 * U(rng);
        const double c0 = 0.2 + 2.0 * U(rng);
        const double p = 1.2 + 1.8 * U(rng);
        const Matrix A = shifted_dissipative(rng, dim, kappa);
        auto F = [c0, p](double, const Vector& u) {
            return Vector(c0 * std::pow(u.norm(), p - 1.0) * u);
        };
        const auto bound = NonlinearityBound::power(c0, p);
        const auto gamma = DissipationProfile::constant(kappa);
        const System sys = System::dense(dim, [A](double) { return A; }, F, bound, gamma, "m");
        const double g0 = 0.5 * std::pow(kappa / c0, 1.0 / (p - 1.0));
        const Vector u0 = g0 * oracles::random_unit_vector(rng, dim);
        const auto norm_traj = norm_trajectory(integrate(sys, u0, 25.0));
        const auto extremal = solve_extremal(bound, gamma, g0, 25.0);
        for (int i = 0; i <= 250; ++i) {
            const double t = 25.0 * i / 250.0;
            CHECK(norm_traj.value_at(t) <= extremal.value_at(t) + 10.0 * norm_traj.atol());
        }
    }
}

TEST_CASE("remark2 short-horizon run stays under the certified bound") {
    GalleryParams p;
    p.scalars = {{"K", 2.0}};
    const System sys = gallery("remark2", p);
    // spread initial mass: decays strictly faster than the concentrated state
    std::mt19937 rng(3u);
    const Vector u0 = 0.1 * oracles::random_unit_vector(rng, sys.dim());
    const auto traj = integrate(sys, u0, 10.0);
    const auto env = Envelope::power_law(10.0, 0.99);
    const auto g = norm_trajectory(traj);
    const auto rep = verify_envelope(g, env, *sys.declared_gamma());
    CHECK(rep.pass);
    CHECK(rep.worst_margin <= rep.tolerance);
    // away from t = 0 the spread state sits strictly inside the bound
    CHECK(g.value_at(5.0) < env.bound(5.0));
}
