#pragma once

#include <cstdint>

namespace speckle {

/// Per-stage timings for one problem size, on the phantom scene with a
/// circular 2r/H = 1.0 aperture, sigma_z = 25 and the PGD initialization as x.
struct BenchReport {
    int size = 0;
    int probes = 0;
    int looks = 0;
    double operator_apply_ms = 0.0;  // one application of A
    double covariance_apply_ms = 0.0;  // one application of Sigma(x)
    double cg_solve_ms = 0.0;
    int cg_iterations = 0;
    double cg_iteration_ms = 0.0;    // cg_solve_ms / cg_iterations
    double gradient_ms = 0.0;        // full grad_mc
    int gradient_cg_iterations = 0;
};

/// `repeats` bounds the operator timing loops; the CG solve is repeated until
/// it has taken ~0.2 s or `repeats` times.
BenchReport run_bench(int size, int probes, int looks, std::uint64_t seed = 0, int repeats = 20);

}  // namespace speckle
