// Independent oracles used by the test suites. Everything here deliberately
// avoids the library's own computational paths: quadrature instead of closed
// forms, Kronecker linear algebra instead of integral formulas, Pade matrix
// exponentials instead of Runge-Kutta flows.

#ifndef DECAYCERT_TESTS_ORACLES_HPP
#define DECAYCERT_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracles {

// Adaptive Simpson quadrature with absolute/relative tolerance.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("simpson: recursion limit");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (b == a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// Closed-form solution of dg/dt = -g + g^2 (Bernoulli): substituting
// z = 1/g gives dz/dt = z - 1, hence g(t) = g0 e^-t / (1 - g0 (1 - e^-t)).
// Blows up at t = ln(g0 / (g0 - 1)) when g0 > 1.
inline double bernoulli(double g0, double t) {
    const double et = std::exp(-t);
    return g0 * et / (1.0 - g0 * (1.0 - et));
}

inline double bernoulli_pole(double g0) {
    if (g0 <= 1.0) throw std::logic_error("no finite-time escape for g0 <= 1");
    return std::log(g0 / (g0 - 1.0));
}

// v(t) = g(t) * e^t for the Bernoulli solution above.
inline double bernoulli_v(double g0, double t) {
    return g0 / (1.0 - g0 * (1.0 - std::exp(-t)));
}

// Scaling-and-squaring Pade matrix exponential (Eigen's implementation).
inline Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& A) {
    return A.exp();
}

// Direct Sylvester solve of A* W + W A = -2V through the Kronecker linear
// system (I (x) A* + A^T (x) I) vec(W) = -2 vec(V).
inline Eigen::MatrixXcd sylvester_solve(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& V) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n * n, n * n);
    const Eigen::MatrixXcd Astar = A.adjoint();
    const Eigen::MatrixXcd At = A.transpose();
    // vec is column-major: vec(A* W) = (I (x) A*) vec W, vec(W A) = (A^T (x) I) vec W
    for (Eigen::Index j = 0; j < n; ++j)
        K.block(j * n, j * n, n, n) += Astar;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            K.block(j * n, i * n, n, n) +=
                At(j, i) * Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd rhs(n * n);
    for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -2.0 * V.col(j);
    const Eigen::VectorXcd w = K.colPivHouseholderQr().solve(rhs);
    Eigen::MatrixXcd W(n, n);
    for (Eigen::Index j = 0; j < n; ++j) W.col(j) = w.segment(j * n, n);
    return W;
}

// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double t, double h) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Random complex matrix with i.i.d. standard normal entries.
inline Eigen::MatrixXcd random_matrix(std::mt19937& rng, int n) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = std::complex<double>(N(rng), N(rng));
    return M;
}

inline Eigen::VectorXcd random_unit_vector(std::mt19937& rng, int n) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::complex<double>(N(rng), N(rng));
    v.normalize();
    return v;
}

}  // namespace oracles

#endif
