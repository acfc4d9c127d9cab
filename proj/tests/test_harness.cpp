#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "oracles.hpp"
#include "speckle/config.hpp"
#include "speckle/diagnostics.hpp"
#include "speckle/io.hpp"
#include "speckle/metrics.hpp"
#include "speckle/phantom.hpp"
#include "support.hpp"

using namespace speckle;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("speckle-test-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Direct SSIM: explicit 2-D Gaussian weights per window, no separability.
double ssim_reference(const RealGrid& a, const RealGrid& b) {
    double w[11][11];
    double total = 0.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            w[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0 * 1.5 * 1.5));
            total += w[i][j];
        }
    const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
    double sum = 0.0;
    int count = 0;
    for (int h = 0; h + 11 <= a.height(); ++h)
        for (int v = 0; v + 11 <= a.width(); ++v) {
            double ma = 0, mb = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    ma += w[i][j] / total * a(h + i, v + j);
                    mb += w[i][j] / total * b(h + i, v + j);
                }
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    const double da = a(h + i, v + j) - ma, db = b(h + i, v + j) - mb;
                    va += w[i][j] / total * da * da;
                    vb += w[i][j] / total * db * db;
                    cov += w[i][j] / total * da * db;
                }
            sum += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return sum / count;
}

}  // namespace

TEST_CASE("psnr") {
    const RealGrid a = oracle::random_image(9, 7, 1, 0.0, 255.0);
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(RealGrid(4, 4, 0.0), RealGrid(4, 4, 255.0)) == doctest::Approx(0.0));
    const RealGrid b = oracle::random_image(9, 7, 2, 0.0, 255.0);
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mse += (a[i] - b[i]) * (a[i] - b[i]) / a.size();
    CHECK(std::abs(psnr(a, b) - 10.0 * std::log10(255.0 * 255.0 / mse)) < 1e-10);
    CHECK_THROWS_KIND(psnr(a, RealGrid(7, 9)), ErrorKind::dimension_mismatch);
}

TEST_CASE("ssim") {
    const RealGrid a = oracle::random_image(24, 20, 3, 0.0, 255.0);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    const double c = 100.0, d = 30.0;
    const double c1 = std::pow(0.01 * 255, 2);
    const double closed = (2 * c * (c + d) + c1) / (c * c + (c + d) * (c + d) + c1);
    CHECK(ssim(RealGrid(16, 16, c), RealGrid(16, 16, c + d)) == doctest::Approx(closed).epsilon(1e-12));

    RealGrid b = a;
    Sampler s(RngStream{4, 4});
    for (double& v : b) v = std::clamp(v + 40.0 * s.normal(), 0.0, 255.0);
    CHECK(std::abs(ssim(a, b) - ssim_reference(a, b)) < 1e-6);
    CHECK_THROWS_KIND(ssim(RealGrid(10, 10), RealGrid(10, 10)), ErrorKind::invalid_argument);
}

TEST_CASE("bundle round trip is bit exact") {
    TempDir dir;
    const ReflectivityImage x(oracle::random_image(6, 5, 1, 0.0, 1.0));
    for (const ApertureSpec& spec : {ApertureSpec::circular(2.0), ApertureSpec::annular(3.0, 1.0),
                                     ApertureSpec::full()}) {
        const MeasurementSet ms = simulate_measurements(x, make_aperture(6, 5, spec), 0.1, 3, 77);
        write_bundle(dir.path / "b.spk", ms);
        const MeasurementSet back = read_bundle(dir.path / "b.spk");
        CHECK(back.sigma_z == ms.sigma_z);
        CHECK(back.seed == ms.seed);
        CHECK(back.aperture.spec().kind == spec.kind);
        CHECK(back.aperture.centered() == ms.aperture.centered());
        REQUIRE(back.looks() == 3);
        for (int l = 0; l < 3; ++l) CHECK(back.measurements[l] == ms.measurements[l]);
        write_bundle(dir.path / "c.spk", back);
        CHECK(slurp(dir.path / "b.spk") == slurp(dir.path / "c.spk"));
    }

    RealGrid custom(6, 5);
    custom(1, 2) = custom(4, 4) = 1.0;
    MeasurementSet ms = simulate_measurements(x, make_custom_aperture(custom), 0.1, 1, 2);
    write_bundle(dir.path / "m.spk", ms);
    CHECK(read_bundle(dir.path / "m.spk").aperture.centered() == custom);

    std::ofstream(dir.path / "junk.spk") << "not a bundle";
    CHECK_THROWS_KIND(read_bundle(dir.path / "junk.spk"), ErrorKind::format);
    const std::string full = slurp(dir.path / "b.spk");
    std::ofstream(dir.path / "short.spk", std::ios::binary) << full.substr(0, full.size() - 8);
    CHECK_THROWS_KIND(read_bundle(dir.path / "short.spk"), ErrorKind::format);
    CHECK_THROWS_KIND(read_bundle(dir.path / "missing.spk"), ErrorKind::io);
}

TEST_CASE("raw and pgm images") {
    TempDir dir;
    const RealGrid g = oracle::random_image(5, 7, 2, 0.0, 1.0);
    write_raw(dir.path / "g.raw", g, 255.0);
    const RawImage back = read_raw(dir.path / "g.raw");
    CHECK(back.scale == 255.0);
    CHECK(max_abs_diff(back.values, g) < 1e-7);
    CHECK(max_abs_diff(read_display_image(dir.path / "g.raw"), scaled(g, 255.0)) < 1e-4);
    CHECK_THROWS_KIND(read_raw(dir.path / "g.raw", 7, 5), ErrorKind::dimension_mismatch);

    write_estimate(dir.path / "e.raw", ReflectivityImage(g));
    const RealGrid preview = read_pgm(dir.path / "e.pgm");
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(preview[i] == std::round(g[i] * 255.0));

    std::ofstream(dir.path / "wide.pgm", std::ios::binary)
        << "P5\n# comment\n2 1\n65535\n" << '\xff' << '\xff' << '\x00' << '\x00';
    const RealGrid wide = read_pgm(dir.path / "wide.pgm");
    CHECK(wide[0] == 255.0);
    CHECK(wide[1] == 0.0);
    std::ofstream(dir.path / "ascii.pgm") << "P2 2 2 10\n0 5\n10 5\n";
    CHECK(read_pgm(dir.path / "ascii.pgm")(1, 0) == 255.0);
    std::ofstream(dir.path / "bad.pgm") << "P6 2 2 255\n";
    CHECK_THROWS_KIND(read_pgm(dir.path / "bad.pgm"), ErrorKind::format);
}

TEST_CASE("run config round trip") {
    RunConfig c;
    c.algorithm = Algorithm::cpnp_em;
    c.aperture = "annulus:1.0:0.34";
    c.sigma_z = 12.5;
    c.looks = 2;
    c.seed = 0xfedcba9876543210ULL;
    c.step_size = 0.0123456789012345;
    c.probe_kind = ProbeKind::rademacher;
    c.assumed_sigma_z = 3.0;
    c.cg.initial_guess = InitialGuess::warm_start;
    c.cg.tolerance = 1e-9;
    c.prior = PriorOp::external("denoise {in} {out}", 12.0);
    c.prior.upper = 1.5;
    c.cpnp_rho = 0.3;
    c.crop_size = 48;
    CHECK(parse_run_config(to_json(c)) == c);
    CHECK(parse_run_config(to_json(RunConfig{})) == RunConfig{});
    CHECK(parse_run_config("{}") == RunConfig{});

    const RunConfig partial = parse_run_config(R"({"pgd_mc": {"iterations": 7}})");
    CHECK(partial.iterations == 7);
    CHECK(partial.probes == 5);
    CHECK_THROWS_KIND(parse_run_config(R"({"pgd_mc": {"iteratons": 7}})"), ErrorKind::format);
    CHECK_THROWS_KIND(parse_run_config(R"({"extra": {}})"), ErrorKind::format);
    CHECK_THROWS_KIND(parse_run_config("{"), ErrorKind::format);

    TempDir dir;
    save_run_config(dir.path / "c.json", c);
    CHECK(load_run_config(dir.path / "c.json") == c);

    const PgdConfig p = make_pgd_config(RunConfig{}, 512, 512);
    CHECK(p.step_size == 0.005);
    CHECK(p.prior.kind == PriorKind::tv);
}

TEST_CASE("aperture option parsing") {
    CHECK(parse_aperture("full", 8, 8).kind == ApertureKind::full);
    CHECK(parse_aperture("circ:1.0", 256, 256).radius == 129.0);
    const ApertureSpec a = parse_aperture("annulus:1.0:0.34", 256, 256);
    CHECK(a.kind == ApertureKind::annular);
    CHECK(a.inner_radius < a.radius);
    CHECK_THROWS_KIND(parse_aperture("circ:x", 8, 8), ErrorKind::invalid_argument);
    CHECK_THROWS_KIND(parse_aperture("square:1", 8, 8), ErrorKind::invalid_argument);
}

TEST_CASE("diagnostics are one JSON record per iteration plus a summary") {
    ReconResult r;
    r.estimate = ReflectivityImage(4, 4, 0.0);
    r.diagnostics.resize(3);
    r.final_psnr = std::numeric_limits<double>::infinity();
    const std::string text = diagnostics_ndjson(r, "pgd-mc");
    std::istringstream in(text);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        CHECK(line.front() == '{');
    }
    CHECK(lines == 4);
    CHECK(text.find("\"final_psnr\":\"inf\"") != std::string::npos);
}

TEST_CASE("phantom stays within the display range") {
    const RealGrid p = make_phantom(64, 64);
    for (double v : p) {
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
    }
}
