#include "speckle/reconstruct.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "speckle/fft.hpp"
#include "speckle/metrics.hpp"

namespace speckle {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct GradientStep {
    RealGrid value;
    int cg_iterations = 0;
    int cg_max_iterations = 0;
    bool cg_converged = true;
    double diag_imag_residual = 0.0;
};

using GradientFn = std::function<GradientStep(const ReflectivityImage&, int)>;
using DisplayFn = std::function<RealGrid(const ReflectivityImage&)>;

RealGrid to_display(const ReflectivityImage& x) { return scaled(x.grid(), kDisplayPeak); }

void check_divergence(const RealGrid& s, int iteration) {
    for (double v : s) {
        if (!std::isfinite(v) || std::abs(v) > kDivergenceBound)
            fail(ErrorKind::diverged, "iterate diverged at iteration " + std::to_string(iteration) +
                                          "; reduce the step size");
    }
}

/// s = x - mu grad; x = prior(s).
ReconResult run_pgd(ReflectivityImage x0, const PgdConfig& cfg, const RealGrid* truth,
                    const GradientFn& gradient, const DisplayFn& display,
                    Clock::time_point started) {
    ReconResult out;
    out.initial = x0;
    out.timings.initialize_s = seconds_since(started);
    if (truth) {
        out.initial_psnr = psnr(*truth, display(x0));
        out.best_psnr = out.initial_psnr;
        out.best_iteration = 0;
        out.best_estimate = x0;
    }

    ReflectivityImage x = std::move(x0);
    for (int t = 0; t < cfg.iterations; ++t) {
        const auto t0 = Clock::now();
        GradientStep g = gradient(x, t);
        const auto t1 = Clock::now();
        out.timings.gradient_s += std::chrono::duration<double>(t1 - t0).count();

        RealGrid s = x.grid();
        double gnorm2 = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] -= cfg.step_size * g.value[i];
            gnorm2 += g.value[i] * g.value[i];
        }
        check_divergence(s, t + 1);
        x = apply_prior(cfg.prior, s);
        out.timings.prior_s += seconds_since(t1);

        std::optional<double> p;
        if (truth) {
            p = psnr(*truth, display(x));
            if (*p > *out.best_psnr) {
                out.best_psnr = p;
                out.best_iteration = t + 1;
                out.best_estimate = x;
            }
        }
        if (cfg.record_trajectory) {
            out.diagnostics.push_back({t + 1, std::sqrt(gnorm2), g.cg_iterations,
                                       g.cg_max_iterations, g.cg_converged,
                                       g.diag_imag_residual, p, seconds_since(t0)});
        }
    }
    out.final_psnr = truth ? std::optional<double>(psnr(*truth, display(x))) : std::nullopt;
    out.estimate = std::move(x);
    out.timings.total_s = seconds_since(started);
    return out;
}

double model_sigma_z2(const MeasurementSet& ms, const PgdConfig& cfg) {
    const double s = cfg.assumed_sigma_z.value_or(ms.sigma_z);
    if (!(s > 0.0))
        fail(ErrorKind::invalid_argument,
             "the likelihood needs sigma_z > 0; supply a positive assumed sigma_z");
    return s * s;
}

void check_truth(const RealGrid* truth, int height, int width) {
    if (truth && (truth->height() != height || truth->width() != width))
        fail(ErrorKind::dimension_mismatch, "truth image shape differs from the measurements");
}

}  // namespace

void PgdConfig::validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size))
        fail(ErrorKind::invalid_argument, "step size must be > 0");
    if (iterations < 1) fail(ErrorKind::invalid_argument, "iterations must be >= 1");
    if (probes < 1) fail(ErrorKind::invalid_argument, "probe count must be >= 1");
    if (assumed_sigma_z && !(*assumed_sigma_z > 0.0))
        fail(ErrorKind::invalid_argument, "assumed sigma_z must be > 0");
    cg.validate();
    prior.validate();
}

double default_step_size(int height, int width) {
    return static_cast<long>(height) * width > 256L * 256L ? 0.005 : 0.01;
}

ReflectivityImage initialize(const MeasurementSet& ms) {
    ms.validate();
    const HolographicOperator forward(ms.aperture);
    RealGrid acc(ms.height(), ms.width());
    ComplexField back;
    for (const auto& y : ms.measurements) {
        forward.apply_adjoint(y, back);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(back[i]);
    }
    for (double& v : acc) v /= ms.looks();
    return ReflectivityImage(std::move(acc));
}

ReconResult pgd_mc(const MeasurementSet& ms, const PgdConfig& cfg, const RealGrid* truth) {
    const auto started = Clock::now();
    cfg.validate();
    check_truth(truth, ms.height(), ms.width());
    const double sigma_z2 = model_sigma_z2(ms, cfg);

    std::vector<ComplexField> warm;
    const bool use_warm = cfg.cg.initial_guess == InitialGuess::warm_start;
    auto gradient = [&](const ReflectivityImage& x, int t) {
        const ProbeBatch probes{cfg.probes, cfg.probe_kind, cfg.seed, static_cast<std::uint64_t>(t)};
        GradientEstimate est = grad_mc(x, ms, sigma_z2, probes, cfg.cg, use_warm ? &warm : nullptr);
        GradientStep step{std::move(est.value), est.total_cg_iterations(), 0, true,
                          est.diag_imag_residual};
        for (const auto* reports : {&est.probe_reports, &est.look_reports}) {
            for (const CGReport& r : *reports) {
                step.cg_max_iterations = std::max(step.cg_max_iterations, r.iterations);
                step.cg_converged = step.cg_converged && r.converged;
            }
        }
        return step;
    };
    return run_pgd(initialize(ms), cfg, truth, gradient, to_display, started);
}

ComplexField crop_spectrum(const ComplexField& y, int crop_height, int crop_width) {
    const int H = y.height(), W = y.width();
    if (crop_height < 1 || crop_width < 1 || crop_height > H || crop_width > W)
        fail(ErrorKind::invalid_geometry, "crop size must lie in [1, image size]");
    const ComplexField spectrum = fftshift(dft2(y));
    const int h0 = H / 2 - crop_height / 2, w0 = W / 2 - crop_width / 2;
    ComplexField block(crop_height, crop_width);
    for (int h = 0; h < crop_height; ++h)
        for (int w = 0; w < crop_width; ++w) block(h, w) = spectrum(h0 + h, w0 + w);
    ComplexField out = idft2(ifftshift(block));
    const double gain = std::pow(static_cast<double>(y.size()) / static_cast<double>(out.size()), 0.25);
    for (cplx& v : out) v *= gain;
    return out;
}

RealGrid spectral_upsample(const RealGrid& g, int height, int width) {
    const int h1 = g.height(), w1 = g.width();
    if (height < h1 || width < w1)
        fail(ErrorKind::invalid_geometry, "spectral_upsample target is smaller than the input");
    const ComplexField spectrum = fftshift(dft2(to_complex(g)));
    ComplexField padded(height, width);
    const int h0 = height / 2 - h1 / 2, w0 = width / 2 - w1 / 2;
    for (int h = 0; h < h1; ++h)
        for (int w = 0; w < w1; ++w) padded(h0 + h, w0 + w) = spectrum(h, w);
    const ComplexField field = idft2(ifftshift(padded));
    const double gain = std::sqrt(static_cast<double>(field.size()) / static_cast<double>(g.size()));
    RealGrid out(height, width);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = field[i].real() * gain;
    return out;
}

RealGrid grad_diagonal_model(const RealGrid& x, const std::vector<ComplexField>& looks,
                             double sigma_z2) {
    if (looks.empty()) fail(ErrorKind::invalid_argument, "need at least one look");
    RealGrid grad(x.height(), x.width());
    for (const auto& y : looks) {
        require_same_shape(x, y, "grad_diagonal_model");
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += std::norm(y[i]);
    }
    const double L = static_cast<double>(looks.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double d = x[i] + sigma_z2;
        grad[i] = 1.0 / d - grad[i] / L / (d * d);
    }
    return grad;
}

ReconResult crop_reconstruct(const MeasurementSet& ms, const CropConfig& crop,
                             const PgdConfig& cfg, const RealGrid* truth) {
    const auto started = Clock::now();
    cfg.validate();
    ms.validate();
    check_truth(truth, ms.height(), ms.width());
    const int H = ms.height(), W = ms.width();
    if (crop.size < 1 || crop.size > std::min(H, W))
        fail(ErrorKind::invalid_geometry, "crop size must lie in [1, min(H, W)]");
    const int n = crop.size;
    const double area_ratio = static_cast<double>(H) * W / (static_cast<double>(n) * n);
    // Cropping keeps the per-pixel noise variance in the spectrum, then the
    // amplitude gain scales it by sqrt(area_ratio).
    const double sigma_z2 = model_sigma_z2(ms, cfg) * std::sqrt(area_ratio);
    const double rescale = 1.0 / std::sqrt(area_ratio);  // H'/H for square inputs

    std::vector<ComplexField> looks;
    RealGrid x0(n, n);
    for (const auto& y : ms.measurements) {
        looks.push_back(crop_spectrum(y, n, n));
        for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += std::norm(looks.back()[i]);
    }
    for (double& v : x0) v /= ms.looks();

    auto gradient = [&](const ReflectivityImage& x, int) {
        return GradientStep{grad_diagonal_model(x.grid(), looks, sigma_z2)};
    };
    auto full_size = [&](const ReflectivityImage& x) {
        return ReflectivityImage::clamped(spectral_upsample(scaled(x.grid(), rescale), H, W));
    };
    auto display = [&](const ReflectivityImage& x) { return to_display(full_size(x)); };

    ReconResult out = run_pgd(ReflectivityImage(std::move(x0)), cfg, truth, gradient, display,
                              started);
    out.cropped = ReflectivityImage(scaled(out.estimate.grid(), rescale));
    out.estimate = full_size(out.estimate);
    out.initial = full_size(out.initial);
    if (out.best_estimate) out.best_estimate = full_size(*out.best_estimate);
    return out;
}

RealGrid grad_specklefree(const ReflectivityImage& x, const ComplexField& y,
                          const HolographicOperator& forward) {
    require_same_shape(x.grid(), y, "grad_specklefree");
    ComplexField residual(x.height(), x.width());
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = std::sqrt(x[i]);
    forward.apply_inplace(residual);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = y[i] - residual[i];
    forward.apply_inplace(residual);  // A^H = A
    RealGrid grad(x.height(), x.width());
    for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] = -residual[i].real() / std::sqrt(std::max(x[i], kSpeckleFreeFloor));
    return grad;
}

double specklefree_objective(const ReflectivityImage& x, const ComplexField& y,
                             const HolographicOperator& forward) {
    require_same_shape(x.grid(), y, "specklefree_objective");
    ComplexField model(x.height(), x.width());
    for (std::size_t i = 0; i < model.size(); ++i) model[i] = std::sqrt(x[i]);
    forward.apply_inplace(model);
    double total = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) total += std::norm(y[i] - model[i]);
    return total;
}

ReconResult specklefree_reconstruct(const ComplexField& y, const ApertureMask& aperture,
                                    const PgdConfig& cfg, const RealGrid* truth) {
    const auto started = Clock::now();
    cfg.validate();
    require_same_shape(y, aperture.centered(), "specklefree_reconstruct");
    check_truth(truth, y.height(), y.width());
    const HolographicOperator forward(aperture);
    ComplexField back;
    forward.apply_adjoint(y, back);
    auto gradient = [&](const ReflectivityImage& x, int) {
        return GradientStep{grad_specklefree(x, y, forward)};
    };
    return run_pgd(ReflectivityImage(abs2(back)), cfg, truth, gradient, to_display, started);
}

}  // namespace speckle
