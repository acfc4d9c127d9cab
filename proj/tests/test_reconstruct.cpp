#include <cmath>

#include "oracles.hpp"
#include "speckle/reconstruct.hpp"
#include "support.hpp"

using namespace speckle;

namespace {

PgdConfig quick(int iterations, PriorOp prior = PriorOp::clamp()) {
    PgdConfig cfg;
    cfg.iterations = iterations;
    cfg.prior = prior;
    return cfg;
}

}  // namespace

TEST_CASE("initialize: trivial cases and speckle statistics") {
    const ApertureMask full = make_aperture(4, 4, ApertureSpec::full());
    MeasurementSet zero;
    zero.aperture = full;
    zero.measurements = {ComplexField(4, 4), ComplexField(4, 4)};
    const ReflectivityImage x0_zero = initialize(zero);
    for (double v : x0_zero.values()) CHECK(v == 0.0);

    const ComplexField y = oracle::random_field(4, 4, 3);
    MeasurementSet one;
    one.aperture = full;
    one.measurements = {y};
    CHECK(max_abs_diff(initialize(one).grid(), abs2(y)) < 1e-14);

    // E|y_i|^2 = x_i; the L-look mean has std x_i / sqrt(L).
    const RealGrid xv = oracle::random_image(4, 4, 5, 0.5, 1.5);
    const int L = 1000;
    const MeasurementSet many = simulate_measurements(ReflectivityImage(xv), full, 0.0, L, 17);
    const ReflectivityImage x0 = initialize(many);
    for (std::size_t i = 0; i < xv.size(); ++i)
        CHECK(std::abs(x0[i] - xv[i]) < 3.0 * xv[i] / std::sqrt(L));
}

TEST_CASE("speckle-free gradient: stationarity at the truth and finite differences") {
    const ApertureMask ap = make_aperture(8, 8, ApertureSpec::circular(2.5));
    const HolographicOperator op(ap);
    const ReflectivityImage x(oracle::random_image(8, 8, 2, 0.2, 1.0));
    const ComplexField y = simulate_specklefree(x, ap, 0.0, 1);
    CHECK(max_abs(grad_specklefree(x, y, op)) < 1e-10);

    const ComplexField noisy = simulate_specklefree(x, ap, 0.3, 1);
    const RealGrid xv = oracle::random_image(8, 8, 3, 0.2, 1.0);
    const RealGrid g = grad_specklefree(ReflectivityImage(xv), noisy, op);
    const double h = 1e-6;
    for (std::size_t i = 0; i < xv.size(); i += 3) {
        RealGrid plus = xv, minus = xv;
        plus[i] += h;
        minus[i] -= h;
        const double fd = (specklefree_objective(ReflectivityImage(plus), noisy, op) -
                           specklefree_objective(ReflectivityImage(minus), noisy, op)) / (2.0 * h);
        CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1e-3, std::abs(g[i])));
    }
}

TEST_CASE("a zero gradient with the clamp prior is a fixed point") {
    const ApertureMask full = make_aperture(6, 6, ApertureSpec::full());
    const ReflectivityImage x(oracle::random_image(6, 6, 4, 0.1, 1.0));
    const ComplexField y = simulate_specklefree(x, full, 0.0, 1);
    const ReconResult r = specklefree_reconstruct(y, full, quick(5));
    CHECK(max_abs_diff(r.estimate.grid(), x.grid()) < 1e-12);
    CHECK(r.diagnostics.size() == 5);
    for (const auto& rec : r.diagnostics) CHECK(rec.grad_norm < 1e-12);
}

TEST_CASE("pgd_mc is deterministic, nonnegative and records one entry per iteration") {
    const ApertureMask ap = make_aperture(16, 16, circular_from_ratio(16, 16, 1.0));
    const RealGrid truth = oracle::random_image(16, 16, 6, 20.0, 240.0);
    const MeasurementSet ms =
        simulate_measurements(ReflectivityImage(scaled(truth, 1.0 / 255.0)), ap, 0.1, 2, 3);
    const PgdConfig cfg = quick(6, PriorOp::tv(2.0));
    const ReconResult a = pgd_mc(ms, cfg, &truth);
    const ReconResult b = pgd_mc(ms, cfg, &truth);
    CHECK(a.estimate == b.estimate);
    CHECK(a.diagnostics.size() == 6);
    for (double v : a.estimate.values()) CHECK(v >= 0.0);
    REQUIRE(a.final_psnr);
    CHECK(*a.best_psnr >= *a.final_psnr);
    CHECK(a.diagnostics.back().psnr == a.final_psnr);
    for (const auto& rec : a.diagnostics) CHECK(rec.cg_iterations > 0);

    PgdConfig silent = cfg;
    silent.record_trajectory = false;
    CHECK(pgd_mc(ms, silent).diagnostics.empty());
}

TEST_CASE("pgd_mc error paths") {
    const ApertureMask ap = make_aperture(8, 8, ApertureSpec::full());
    const ReflectivityImage x(oracle::random_image(8, 8, 1, 0.1, 1.0));
    const MeasurementSet noiseless = simulate_measurements(x, ap, 0.0, 1, 1);
    CHECK_THROWS_KIND(pgd_mc(noiseless, quick(1)), ErrorKind::invalid_argument);
    PgdConfig surrogate = quick(1);
    surrogate.assumed_sigma_z = 0.05;
    CHECK_NOTHROW(pgd_mc(noiseless, surrogate));

    const MeasurementSet ms = simulate_measurements(x, ap, 0.01, 1, 1);
    PgdConfig wild = quick(3);
    wild.step_size = 1e9;
    CHECK_THROWS_KIND(pgd_mc(ms, wild), ErrorKind::diverged);
    PgdConfig bad = quick(1);
    bad.step_size = 0.0;
    CHECK_THROWS_KIND(pgd_mc(ms, bad), ErrorKind::invalid_argument);
    const RealGrid wrong(4, 4);
    CHECK_THROWS_KIND(pgd_mc(ms, quick(1), &wrong), ErrorKind::dimension_mismatch);
}

TEST_CASE("default step sizes") {
    CHECK(default_step_size(128, 128) == 0.01);
    CHECK(default_step_size(256, 256) == 0.01);
    CHECK(default_step_size(512, 512) == 0.005);
}

TEST_CASE("crop with H' = H matches pgd_mc at full aperture") {
    const ApertureMask full = make_aperture(8, 8, ApertureSpec::full());
    const ReflectivityImage x(oracle::random_image(8, 8, 9, 0.1, 1.0));
    const MeasurementSet ms = simulate_measurements(x, full, 0.1, 2, 4);
    CHECK(max_abs_diff(crop_spectrum(ms.measurements[0], 8, 8), ms.measurements[0]) < 1e-14);

    PgdConfig cfg = quick(10, PriorOp::tv(2.0));
    cfg.probes = 1;
    cfg.probe_kind = ProbeKind::rademacher;  // exact diagonal when A = I
    cfg.cg.tolerance = 1e-13;
    const ReconResult cropped = crop_reconstruct(ms, CropConfig{8}, cfg);
    const ReconResult direct = pgd_mc(ms, cfg);
    CHECK(max_abs_diff(cropped.estimate.grid(), direct.estimate.grid()) < 1e-8);
    CHECK(max_abs_diff(cropped.cropped->grid(), direct.estimate.grid()) < 1e-8);
}

TEST_CASE("cropping to half size scales intensity by H/H' before the H'/H rescale") {
    const ApertureMask full = make_aperture(64, 64, ApertureSpec::full());
    const double c = 0.6;
    const MeasurementSet ms = simulate_measurements(ReflectivityImage(64, 64, c), full, 0.0, 8, 2);
    double raw = 0.0;
    for (const auto& y : ms.measurements) raw += mean(abs2(crop_spectrum(y, 32, 32))) / 8.0;
    CHECK(raw == doctest::Approx(2.0 * c).epsilon(0.03));

    PgdConfig cfg = quick(1);
    cfg.step_size = 1e-12;
    cfg.assumed_sigma_z = 0.05;
    const ReconResult r = crop_reconstruct(ms, CropConfig{32}, cfg);
    REQUIRE(r.cropped);
    CHECK(r.cropped->height() == 32);
    CHECK(r.estimate.height() == 64);
    CHECK(mean(r.cropped->grid()) == doctest::Approx(c).epsilon(0.03));
    CHECK_THROWS_KIND(crop_reconstruct(ms, CropConfig{65}, cfg), ErrorKind::invalid_geometry);
}

TEST_CASE("spectral upsampling preserves the mean and is the identity at equal size") {
    const RealGrid g = oracle::random_image(8, 8, 4, 0.0, 1.0);
    CHECK(max_abs_diff(spectral_upsample(g, 8, 8), g) < 1e-12);
    const RealGrid up = spectral_upsample(g, 16, 16);
    CHECK(mean(up) == doctest::Approx(mean(g)).epsilon(1e-12));
    const RealGrid flat(4, 4, 0.3);
    CHECK(max_abs_diff(spectral_upsample(flat, 12, 12), RealGrid(12, 12, 0.3)) < 1e-12);
}
