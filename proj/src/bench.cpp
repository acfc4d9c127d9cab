#include "speckle/bench.hpp"

#include <chrono>

#include "speckle/phantom.hpp"
#include "speckle/reconstruct.hpp"

namespace speckle {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

BenchReport run_bench(int size, int probes, int looks, std::uint64_t seed, int repeats) {
    if (size < 8) fail(ErrorKind::invalid_argument, "bench size must be >= 8");
    if (probes < 1 || looks < 1 || repeats < 1)
        fail(ErrorKind::invalid_argument, "bench needs probes, looks and repeats >= 1");
    const ReflectivityImage truth(scaled(make_phantom(size, size), 1.0 / kDisplayPeak));
    const ApertureMask aperture = make_aperture(size, size, circular_from_ratio(size, size, 1.0));
    const double sigma_z = 25.0 / kDisplayPeak;
    const MeasurementSet ms = simulate_measurements(truth, aperture, sigma_z, looks, seed);
    const ReflectivityImage x = initialize(ms);
    const HolographicOperator forward(aperture);
    const CovarianceOperator sigma(forward, x, sigma_z * sigma_z);

    BenchReport r;
    r.size = size;
    r.probes = probes;
    r.looks = looks;

    ComplexField out;
    forward.apply(ms.measurements[0], out);  // plan creation outside the timing
    auto t0 = Clock::now();
    for (int i = 0; i < repeats; ++i) forward.apply(ms.measurements[0], out);
    r.operator_apply_ms = ms_since(t0) / repeats;

    t0 = Clock::now();
    for (int i = 0; i < repeats; ++i) sigma.apply(ms.measurements[0], out);
    r.covariance_apply_ms = ms_since(t0) / repeats;

    const CGConfig cg;
    int solves = 0;
    double total_ms = 0.0;
    t0 = Clock::now();
    do {
        const CGResult solved = cg_solve(sigma, ms.measurements[0], cg);
        r.cg_iterations = solved.report.iterations;
        ++solves;
        total_ms = ms_since(t0);
    } while (solves < repeats && total_ms < 200.0);
    r.cg_solve_ms = total_ms / solves;
    r.cg_iteration_ms = r.cg_solve_ms / std::max(1, r.cg_iterations);

    const ProbeBatch batch{probes, ProbeKind::gaussian, seed, 0};
    t0 = Clock::now();
    const GradientEstimate g = grad_mc(x, ms, sigma_z * sigma_z, batch, cg);
    r.gradient_ms = ms_since(t0);
    r.gradient_cg_iterations = g.total_cg_iterations();
    return r;
}

}  // namespace speckle
