#include <cmath>

#include "oracles.hpp"
#include "speckle/likelihood.hpp"
#include "support.hpp"

using namespace speckle;

namespace {

MeasurementSet small_set(const ApertureSpec& spec, std::uint64_t seed, int looks = 3) {
    const ReflectivityImage x(oracle::random_image(6, 6, seed, 0.2, 1.0));
    return simulate_measurements(x, make_aperture(6, 6, spec), 0.2, looks, seed);
}

}  // namespace

TEST_CASE("grad_exact matches central differences of nll_exact") {
    const MeasurementSet ms = small_set(ApertureSpec::circular(2.0), 1);
    const RealGrid xv = oracle::random_image(6, 6, 2, 0.3, 1.0);
    const double s2 = 0.04;
    const RealGrid g = grad_exact(ReflectivityImage(xv), ms, s2);
    const double h = 1e-5;
    for (std::size_t i = 0; i < xv.size(); i += 5) {
        RealGrid plus = xv, minus = xv;
        plus[i] += h;
        minus[i] -= h;
        const double fd = (nll_exact(ReflectivityImage(plus), ms, s2) -
                           nll_exact(ReflectivityImage(minus), ms, s2)) / (2.0 * h);
        CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
    }
}

TEST_CASE("full aperture reduces the likelihood to independent pixels") {
    const MeasurementSet ms = small_set(ApertureSpec::full(), 3, 4);
    const RealGrid xv = oracle::random_image(6, 6, 4, 0.1, 1.0);
    const double s2 = 0.04;
    double nll = 0.0;
    RealGrid expect(6, 6);
    for (std::size_t i = 0; i < xv.size(); ++i) {
        double energy = 0.0;
        for (const auto& y : ms.measurements) energy += std::norm(y[i]) / 4.0;
        const double d = xv[i] + s2;
        nll += std::log(d) + energy / d;
        expect[i] = 1.0 / d - energy / (d * d);
    }
    CHECK(nll_exact(ReflectivityImage(xv), ms, s2) == doctest::Approx(nll).epsilon(1e-12));
    CHECK(max_abs_diff(grad_exact(ReflectivityImage(xv), ms, s2), expect) < 1e-10);

    CGConfig cg;
    cg.tolerance = 1e-13;
    const GradientEstimate est = grad_mc(ReflectivityImage(xv), ms, s2,
                                         ProbeBatch{1, ProbeKind::rademacher, 7, 0}, cg);
    CHECK(max_abs_diff(est.value, expect) < 1e-8);
    CHECK(est.probes_used == 1);
    CHECK(est.look_reports.size() == 4);
}

TEST_CASE("grad_mc data term is deterministic and the diagonal estimate unbiased") {
    const MeasurementSet ms = small_set(ApertureSpec::circular(1.5), 5);
    const ReflectivityImage x(oracle::random_image(6, 6, 6, 0.2, 1.0));
    const double s2 = 0.04;
    const RealGrid exact = grad_exact(x, ms, s2);
    CGConfig cg;
    cg.tolerance = 1e-12;
    const GradientEstimate a = grad_mc(x, ms, s2, ProbeBatch{2000, ProbeKind::gaussian, 1, 0}, cg);
    const GradientEstimate b = grad_mc(x, ms, s2, ProbeBatch{3, ProbeKind::gaussian, 2, 0}, cg);
    CHECK(max_abs_diff(a.data, b.data) < 1e-9);
    CHECK(a.diag_imag_residual < 1e-10);  // symmetric mask, real probes
    // 2000 Gaussian probes: per-coordinate std error well below 0.1 here.
    CHECK(max_abs_diff(a.value, exact) < 0.25);
    double mean_err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) mean_err += (a.value[i] - exact[i]) / exact.size();
    CHECK(std::abs(mean_err) < 0.05);
}

TEST_CASE("probe batches are reproducible and distinct") {
    const ProbeBatch p{2, ProbeKind::gaussian, 9, 3};
    CHECK(p.stream(0).stream == ProbeBatch{2, ProbeKind::gaussian, 9, 3}.stream(0).stream);
    CHECK(p.stream(0).stream != p.stream(1).stream);
    CHECK(p.stream(0).stream != ProbeBatch{2, ProbeKind::gaussian, 9, 4}.stream(0).stream);
}

TEST_CASE("warm-started look solves reuse previous solutions") {
    const MeasurementSet ms = small_set(ApertureSpec::circular(2.0), 8);
    const ReflectivityImage x(oracle::random_image(6, 6, 9, 0.2, 1.0));
    CGConfig cg;
    cg.initial_guess = InitialGuess::warm_start;
    std::vector<ComplexField> warm;
    const GradientEstimate first = grad_mc(x, ms, 0.04, ProbeBatch{1, ProbeKind::gaussian, 1, 0}, cg, &warm);
    CHECK(warm.size() == 3);
    const GradientEstimate again = grad_mc(x, ms, 0.04, ProbeBatch{1, ProbeKind::gaussian, 1, 0}, cg, &warm);
    for (const CGReport& r : again.look_reports) CHECK(r.iterations <= 1);
    CHECK(max_abs_diff(first.data, again.data) < 1e-8);
}

TEST_CASE("likelihood preconditions") {
    const MeasurementSet ms = small_set(ApertureSpec::full(), 1);
    CHECK_THROWS_KIND(nll_exact(ReflectivityImage(6, 6, 1.0), ms, 0.0), ErrorKind::invalid_argument);
    CHECK_THROWS_KIND(grad_exact(ReflectivityImage(5, 6, 1.0), ms, 0.1), ErrorKind::dimension_mismatch);
    CHECK_THROWS_KIND(grad_mc(ReflectivityImage(6, 6, 1.0), ms, 0.1, ProbeBatch{0}, CGConfig{}),
                      ErrorKind::invalid_argument);
}
