#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "speckle/bench.hpp"
#include "speckle/config.hpp"
#include "speckle/diagnostics.hpp"
#include "speckle/io.hpp"
#include "speckle/metrics.hpp"
#include "speckle/phantom.hpp"

using namespace speckle;

namespace {

/// "<path>" (.pgm, or .raw with sidecar) or "phantom:<N>".
RealGrid load_image(const std::string& spec) {
    const std::string prefix = "phantom:";
    if (spec.rfind(prefix, 0) == 0) {
        int n = 0;
        try {
            n = std::stoi(spec.substr(prefix.size()));
        } catch (const std::logic_error&) {
            fail(ErrorKind::invalid_argument, "bad phantom size in '" + spec + "'");
        }
        return make_phantom(n, n);
    }
    return read_display_image(spec);
}

std::string format_psnr(double p) {
    if (std::isinf(p)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", p);
    return buf;
}

struct SimulateArgs {
    std::string image, aperture = "circ:1.0", out;
    double sigma = 25.0;
    int looks = 4;
    std::uint64_t seed = 0;
    bool specklefree = false;
};

void run_simulate(const SimulateArgs& a) {
    const RealGrid display = load_image(a.image);
    const ReflectivityImage x(scaled(display, 1.0 / kDisplayPeak));
    const ApertureMask aperture =
        make_aperture(x.height(), x.width(), parse_aperture(a.aperture, x.height(), x.width()));
    const double sigma_z = a.sigma / kDisplayPeak;
    MeasurementSet ms;
    if (a.specklefree) {
        ms.measurements = {simulate_specklefree(x, aperture, sigma_z, a.seed)};
        ms.sigma_z = sigma_z;
        ms.aperture = aperture;
        ms.seed = a.seed;
    } else {
        ms = simulate_measurements(x, aperture, sigma_z, a.looks, a.seed);
    }
    write_bundle(a.out, ms);
    std::cout << "wrote " << a.out << ": " << x.height() << "x" << x.width() << ", "
              << ms.looks() << " look(s), transparency " << aperture.transparency() << '\n';
}

struct ReconstructArgs {
    std::string bundle, algo, prior, config, out, truth, diagnostics;
};

void run_reconstruct(const ReconstructArgs& a) {
    RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
    if (!a.algo.empty()) cfg.algorithm = parse_algorithm(a.algo);
    if (!a.prior.empty()) {
        const PriorOp parsed = parse_prior(a.prior);
        // Keep iteration budgets and timeouts from the config file.
        PriorOp merged = cfg.prior;
        merged.kind = parsed.kind;
        merged.median_window = parsed.median_window;
        merged.tv_lambda = parsed.tv_lambda;
        merged.external_command = parsed.external_command;
        cfg.prior = merged;
    }

    const MeasurementSet ms = read_bundle(a.bundle);
    RealGrid truth;
    if (!a.truth.empty()) truth = load_image(a.truth);
    const RealGrid* truth_ptr = a.truth.empty() ? nullptr : &truth;

    ReconResult result;
    switch (cfg.algorithm) {
        case Algorithm::pgd_mc:
            result = pgd_mc(ms, make_pgd_config(cfg, ms.height(), ms.width()), truth_ptr);
            break;
        case Algorithm::cpnp_em:
            result = cpnp_em(ms, make_cpnp_config(cfg), truth_ptr);
            break;
        case Algorithm::crop: {
            const CropConfig crop{cfg.crop_size > 0 ? cfg.crop_size
                                                    : std::min(ms.height(), ms.width()) / 2};
            result = crop_reconstruct(ms, crop, make_pgd_config(cfg, ms.height(), ms.width()),
                                      truth_ptr);
            break;
        }
        case Algorithm::specklefree: {
            if (ms.looks() != 1)
                fail(ErrorKind::invalid_argument,
                     "specklefree reconstruction expects a single-measurement bundle "
                     "(simulate --specklefree)");
            PgdConfig pgd = make_specklefree_config(cfg);
            result = specklefree_reconstruct(ms.measurements[0], ms.aperture, pgd, truth_ptr);
            break;
        }
    }

    write_estimate(a.out, result.estimate);
    const std::string diag = a.diagnostics.empty() ? a.out + ".ndjson" : a.diagnostics;
    write_diagnostics(diag, result, to_string(cfg.algorithm));
    std::cout << "wrote " << a.out << " and " << diag;
    if (result.final_psnr)
        std::cout << "; psnr initial " << format_psnr(*result.initial_psnr) << " dB, final "
                  << format_psnr(*result.final_psnr) << " dB, best "
                  << format_psnr(*result.best_psnr) << " dB (iteration " << result.best_iteration
                  << ")";
    std::cout << '\n';
}

void run_eval(const std::string& ref, const std::string& test) {
    const MetricReport m = evaluate(load_image(ref), load_image(test));
    std::cout << "psnr " << format_psnr(m.psnr) << "\nssim " << m.ssim << '\n';
}

void run_bench_cmd(int size, int probes, int looks, std::uint64_t seed) {
    const BenchReport r = run_bench(size, probes, looks, seed);
    std::printf(
        "size %d probes %d looks %d\n"
        "operator_apply_ms %.4f\ncovariance_apply_ms %.4f\n"
        "cg_solve_ms %.3f\ncg_iterations %d\ncg_iteration_ms %.4f\n"
        "gradient_ms %.3f\ngradient_cg_iterations %d\n",
        r.size, r.probes, r.looks, r.operator_apply_ms, r.covariance_apply_ms, r.cg_solve_ms,
        r.cg_iterations, r.cg_iteration_ms, r.gradient_ms, r.gradient_cg_iterations);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-free maximum-likelihood reconstruction for coherent imaging"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate speckled measurements");
    simulate->add_option("--image", sim.image, "PGM/raw image or phantom:<N>")->required();
    simulate->add_option("--aperture", sim.aperture, "circ:<2r/H> | annulus:<o>:<i> | full");
    simulate->add_option("--sigma", sim.sigma, "noise std on the 0-255 scale");
    simulate->add_option("--looks", sim.looks)->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed);
    simulate->add_flag("--specklefree", sim.specklefree, "single look of y = A sqrt(x) + z");
    simulate->add_option("--out", sim.out, "bundle path")->required();

    ReconstructArgs rec;
    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct from a bundle");
    reconstruct->add_option("--bundle", rec.bundle)->required();
    reconstruct->add_option("--algo", rec.algo, "pgd-mc | cpnp-em | crop | specklefree");
    reconstruct->add_option("--prior", rec.prior, "clamp | median:<k> | tv:<lambda> | external:<cmd>");
    reconstruct->add_option("--config", rec.config, "JSON run config");
    reconstruct->add_option("--out", rec.out, "raw estimate path")->required();
    reconstruct->add_option("--truth", rec.truth, "ground truth for PSNR diagnostics");
    reconstruct->add_option("--diagnostics", rec.diagnostics, "NDJSON path (default <out>.ndjson)");

    std::string ref, test;
    auto* eval = app.add_subcommand("eval", "PSNR and SSIM of two images");
    eval->add_option("--ref", ref)->required();
    eval->add_option("--test", test)->required();

    int size = 256, probes = 5, looks = 4;
    std::uint64_t bench_seed = 0;
    auto* bench = app.add_subcommand("bench", "Time operator, CG and gradient");
    bench->add_option("--size", size)->check(CLI::IsMember({128, 256, 512}));
    bench->add_option("--probes", probes)->check(CLI::PositiveNumber);
    bench->add_option("--looks", looks)->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) run_simulate(sim);
        else if (reconstruct->parsed()) run_reconstruct(rec);
        else if (eval->parsed()) run_eval(ref, test);
        else if (bench->parsed()) run_bench_cmd(size, probes, looks, bench_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
