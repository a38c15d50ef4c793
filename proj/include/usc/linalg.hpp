// linalg.hpp — Dense complex linear-algebra kernel: Hermitian eigendecomposition,
// linear solves, Kronecker products, and adaptive matrix-ODE propagation.

#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace usc {

using Complex = std::complex<double>;

// Dense column-major complex storage throughout (Eigen default).
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Error taxonomy; the CLI maps these onto distinct exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularMatrixError : NumericsError {
    using NumericsError::NumericsError;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace linalg {

bool is_finite(const ComplexMatrix& m);

// ‖m − m†‖_F
double hermiticity_defect(const ComplexMatrix& m);

struct EigOptions {
    double hermiticity_tol{1e-10};  // relative to max(1, ‖h‖_F)
};

struct EigResult {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // orthonormal columns, phase-fixed
};

// Fixes the global phase of each column so that its largest-magnitude
// component is real and positive (first index wins near-ties).
void apply_phase_convention(ComplexMatrix& vectors);

EigResult hermitian_eig(const ComplexMatrix& h, const EigOptions& opts = {});

ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b,
                           const std::string& context = {},
                           double pivot_tol = 1e-14);

// Multi-RHS variant sharing one factorization.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b,
                           const std::string& context = {},
                           double pivot_tol = 1e-14);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// e^{generator·t}·v0 via adaptive embedded Runge-Kutta 5(4).
ComplexVector propagate_ode(const ComplexMatrix& generator, const ComplexVector& v0,
                            double t, double tol = 1e-10,
                            std::size_t max_steps = 20'000'000);

// General (non-Hermitian) eigendecomposition; diagnostics and oracles only,
// not part of the kernel contract above.
struct ComplexEigResult {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;
};
ComplexEigResult complex_eig(const ComplexMatrix& m);

// Runs fn(i) for i in [0, n) on n_threads; each index owns its output slot,
// so results are identical to a serial loop.
void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn);

}  // namespace linalg
}  // namespace usc
