#pragma once

#include "speckle/operators.hpp"

namespace speckle {

enum class InitialGuess { zero, warm_start };

struct CGConfig {
    double tolerance = 1e-6;  // absolute bound on ||r||_2
    int max_iterations = 500;
    InitialGuess initial_guess = InitialGuess::zero;

    void validate() const;
    bool operator==(const CGConfig&) const = default;
};

struct CGReport {
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

struct CGResult {
    ComplexField solution;
    CGReport report;
};

/// Conjugate gradient for a Hermitian positive-definite operator.
///
/// With InitialGuess::warm_start, `guess` seeds the iterate (zero when null or
/// shape-mismatched). Stops as soon as ||r_t||_2 <= tolerance, which can be at
/// iteration 0. Returns the last iterate with converged = false after
/// max_iterations. Throws cg_breakdown when p^H Sigma p is not positive.
CGResult cg_solve(const LinearOperator& sigma, const ComplexField& b, const CGConfig& cfg,
                  const ComplexField* guess = nullptr);

}  // namespace speckle
