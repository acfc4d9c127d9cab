#pragma once

#include <cstdint>
#include <vector>

#include "speckle/cg.hpp"
#include "speckle/speckle_sim.hpp"

namespace speckle {

// Negative log-likelihood of L looks (up to constants):
//   f_L(x) = log det Sigma(x) + (1/L) sum_l y_l^H Sigma(x)^{-1} y_l
// and its gradient
//   grad f_L(x) = diag(A^H Sigma^{-1} A) - (1/L) sum_l |A^H Sigma^{-1} y_l|^2.

/// Dense evaluation of f_L through a Cholesky factorization. n <= 4096.
double nll_exact(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2);

/// Dense gradient from the explicit inverse. n <= 4096.
RealGrid grad_exact(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2);

enum class ProbeKind { gaussian, rademacher };

/// K probe vectors drawn from streams (seed, batch, k). A new batch index per
/// PGD iteration gives fresh, independent probes.
struct ProbeBatch {
    int count = 5;
    ProbeKind kind = ProbeKind::gaussian;
    std::uint64_t seed = 0;
    std::uint64_t batch = 0;

    RngStream stream(int k) const;
};

struct DiagEstimate {
    RealGrid diag;
    std::vector<CGReport> reports;
    /// max_i |Im((1/K) sum_k w_k v_k)_i|, dropped from the returned estimate.
    double imag_residual = 0.0;
};

/// Hutchinson-style estimate of diag(A^H Sigma^{-1} A):
/// (1/K) sum_k Re(A^H u_k .* v_k) with Sigma u_k = A v_k solved by CG.
DiagEstimate estimate_diag(const CovarianceOperator& sigma, const ProbeBatch& probes,
                           const CGConfig& cg);

struct GradientEstimate {
    RealGrid value;  // diag - data, elementwise
    RealGrid diag;
    RealGrid data;   // (1/L) sum_l |A^H h_l|^2
    std::vector<CGReport> probe_reports;
    std::vector<CGReport> look_reports;
    int probes_used = 0;
    double diag_imag_residual = 0.0;

    int total_cg_iterations() const;
};

/// Matrix-free gradient: K probe solves plus one solve per look.
/// `warm`, when given, holds per-look solutions reused as CG starting points
/// (only if cg.initial_guess == warm_start) and is updated in place.
GradientEstimate grad_mc(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2,
                         const ProbeBatch& probes, const CGConfig& cg,
                         std::vector<ComplexField>* warm = nullptr);

}  // namespace speckle
