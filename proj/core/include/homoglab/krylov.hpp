#pragma once

// Matrix-free Krylov solvers on complex vectors.

#include <functional>
#include <span>
#include <string>

#include "homoglab/types.hpp"

namespace homoglab::krylov {

/// y = A x. Input and output never alias.
using LinearMap = std::function<void(std::span<const Complex>, std::span<Complex>)>;

struct Options {
    double tolerance = 1e-10;  // on ||b - A x|| / ||b||
    int max_iterations = 1000;
    int restart = 80;          // GMRES only
    std::string label = "krylov";
};

struct Result {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for Hermitian positive definite A and
/// preconditioner. x holds the initial guess on entry. Throws NoConvergence.
Result conjugate_gradient(const LinearMap& A, const LinearMap& preconditioner,
                          std::span<const Complex> b, std::span<Complex> x, const Options& options);

/// Restarted GMRES with right preconditioning; the residual tested is the
/// true residual of the unpreconditioned system. Throws NoConvergence.
Result gmres(const LinearMap& A, const LinearMap& preconditioner, std::span<const Complex> b,
             std::span<Complex> x, const Options& options);

double norm2(std::span<const Complex> v);
Complex dot(std::span<const Complex> a, std::span<const Complex> b);  // sum conj(a_i) b_i

} // namespace homoglab::krylov
