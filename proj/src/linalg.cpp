// linalg.cpp — Eigen-backed kernel implementation.

#include "usc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

namespace usc::linalg {

bool is_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

double hermiticity_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).norm();
}

void apply_phase_convention(ComplexMatrix& vectors) {
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            const double a = std::abs(vectors(i, k));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (best <= 0.0) continue;
        const Complex pivot = vectors(imax, k);
        vectors.col(k) *= std::conj(pivot) / std::abs(pivot);
    }
}

EigResult hermitian_eig(const ComplexMatrix& h, const EigOptions& opts) {
    if (h.rows() != h.cols()) {
        std::ostringstream msg;
        msg << "hermitian_eig: matrix is not square (" << h.rows() << "x" << h.cols() << ")";
        throw NumericsError(msg.str());
    }
    if (!is_finite(h)) throw NumericsError("hermitian_eig: input has non-finite entries");
    const double defect = hermiticity_defect(h);
    const double scale = std::max(1.0, h.norm());
    if (defect > opts.hermiticity_tol * scale) {
        std::ostringstream msg;
        msg << "hermitian_eig: input not Hermitian, defect ‖h−h†‖ = " << defect
            << " exceeds " << opts.hermiticity_tol << "·max(1,‖h‖) = " << opts.hermiticity_tol * scale;
        throw NumericsError(msg.str());
    }

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) throw ConvergenceError("hermitian_eig: QR iteration failed");

    EigResult result;
    result.eigenvalues = solver.eigenvalues();
    result.eigenvectors = solver.eigenvectors();
    apply_phase_convention(result.eigenvectors);
    return result;
}

namespace {

Eigen::PartialPivLU<ComplexMatrix> factor_checked(const ComplexMatrix& a,
                                                  const std::string& context,
                                                  double pivot_tol) {
    if (a.rows() != a.cols()) throw NumericsError("solve_linear: matrix is not square");
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const double scale = a.norm();
    const double floor = pivot_tol * scale;
    double min_pivot = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        min_pivot = std::min(min_pivot, std::abs(lu.matrixLU()(i, i)));
    if (!(min_pivot > floor)) {
        std::ostringstream msg;
        msg << "solve_linear: numerically singular system (pivot " << min_pivot
            << " below " << pivot_tol << "·‖a‖ = " << floor << ")";
        if (!context.empty()) msg << " [" << context << "]";
        throw SingularMatrixError(msg.str());
    }
    return lu;
}

void check_residual(const ComplexMatrix& a, const ComplexMatrix& x, const ComplexMatrix& b,
                    const std::string& context) {
    const double res = (a * x - b).norm();
    const double bound = 1e-9 * (a.norm() * x.norm() + b.norm());
    if (res > bound) {
        std::ostringstream msg;
        msg << "solve_linear: residual " << res << " exceeds bound " << bound;
        if (!context.empty()) msg << " [" << context << "]";
        throw NumericsError(msg.str());
    }
}

}  // namespace

ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b,
                           const std::string& context, double pivot_tol) {
    if (b.size() != a.rows()) throw NumericsError("solve_linear: rhs length mismatch");
    auto lu = factor_checked(a, context, pivot_tol);
    ComplexVector x = lu.solve(b);
    check_residual(a, x, b, context);
    return x;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b,
                           const std::string& context, double pivot_tol) {
    if (b.rows() != a.rows()) throw NumericsError("solve_linear: rhs row mismatch");
    auto lu = factor_checked(a, context, pivot_tol);
    ComplexMatrix x = lu.solve(b);
    check_residual(a, x, b, context);
    return x;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector propagate_ode(const ComplexMatrix& generator, const ComplexVector& v0,
                            double t, double tol, std::size_t max_steps) {
    if (t < 0.0) throw NumericsError("propagate_ode: negative propagation time");
    if (generator.rows() != generator.cols() || generator.rows() != v0.size())
        throw NumericsError("propagate_ode: dimension mismatch");
    if (t == 0.0) return v0;

    // Dormand-Prince 5(4) tableau (autonomous system: node times unused).
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double scale0 = std::max(1.0, v0.lpNorm<Eigen::Infinity>());
    auto rhs = [&](const ComplexVector& y) -> ComplexVector { return generator * y; };

    ComplexVector y = v0;
    ComplexVector k1 = rhs(y);
    double time = 0.0;

    // Initial step from the generator's scale.
    const double gnorm = std::max(generator.lpNorm<Eigen::Infinity>(), 1e-300);
    double h = std::min(t, 0.1 / gnorm);

    std::size_t steps = 0;
    while (time < t) {
        if (++steps > max_steps) {
            std::ostringstream msg;
            msg << "propagate_ode: tolerance " << tol << " unreachable within " << max_steps
                << " steps (t = " << t << ", reached " << time << ")";
            throw ConvergenceError(msg.str());
        }
        h = std::min(h, t - time);
        if (h <= std::abs(time) * 1e-16 && time > 0.0)
            throw ConvergenceError("propagate_ode: step size underflow");

        ComplexVector k2 = rhs(y + h * (a21 * k1));
        ComplexVector k3 = rhs(y + h * (a31 * k1 + a32 * k2));
        ComplexVector k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        ComplexVector k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        ComplexVector k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ComplexVector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        ComplexVector k7 = rhs(y_new);  // FSAL
        ComplexVector err_vec =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = tol * scale0 + tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            const double r = std::abs(err_vec(i)) / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            time += h;
            y.swap(y_new);
            k1.swap(k7);
        }
        const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return y;
}

ComplexEigResult complex_eig(const ComplexMatrix& m) {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) throw ConvergenceError("complex_eig: iteration failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, n_threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace usc::linalg
