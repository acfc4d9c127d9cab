#include "speckle/cpnp_em.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "speckle/metrics.hpp"

namespace speckle {
namespace {

using Clock = std::chrono::steady_clock;

double cubic(double x, double x1, double s2, double c) {
    return ((x - x1) * x + s2) * x - s2 * c;
}

double polish(double x, double x1, double s2, double c) {
    for (int it = 0; it < 60; ++it) {
        const double f = cubic(x, x1, s2, c);
        const double df = (3.0 * x - 2.0 * x1) * x + s2;
        if (df == 0.0) break;
        const double step = f / df;
        x -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

/// The cubic is negative at 0 and positive for large x.
double bisect_positive_root(double x1, double s2, double c) {
    double lo = 0.0, hi = std::max(1.0, x1 + 1.0);
    while (cubic(hi, x1, s2, c) <= 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cubic(mid, x1, s2, c) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void CpnpConfig::validate() const {
    if (iterations < 1) fail(ErrorKind::invalid_argument, "cpnp iterations must be >= 1");
    if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "cpnp sigma must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) fail(ErrorKind::invalid_argument, "cpnp rho must lie in (0, 1)");
    if (assumed_sigma_z && !(*assumed_sigma_z > 0.0))
        fail(ErrorKind::invalid_argument, "assumed sigma_z must be > 0");
    denoiser.validate();
}

PosteriorStats e_step(const RealGrid& xbar, const MeasurementSet& ms, double sigma_z2) {
    ms.validate();
    require_same_shape(xbar, ms.aperture.centered(), "e_step");
    if (!(sigma_z2 > 0.0)) fail(ErrorKind::invalid_argument, "e_step needs sigma_z^2 > 0");
    const HolographicOperator forward(ms.aperture);
    RealGrid energy(xbar.height(), xbar.width());
    ComplexField back;
    for (const auto& y : ms.measurements) {
        forward.apply_adjoint(y, back);
        for (std::size_t i = 0; i < energy.size(); ++i) energy[i] += std::norm(back[i]);
    }
    PosteriorStats out{RealGrid(xbar.height(), xbar.width()), RealGrid(xbar.height(), xbar.width())};
    for (std::size_t i = 0; i < xbar.size(); ++i) {
        if (!(xbar[i] >= 0.0)) fail(ErrorKind::invalid_argument, "e_step needs x-bar >= 0");
        const double c = sigma_z2 * xbar[i] / (sigma_z2 + xbar[i]);
        out.c[i] = c;
        out.musq[i] = c * c / (sigma_z2 * sigma_z2) * energy[i] / ms.looks();
    }
    return out;
}

double m_step_objective(double x, double x1, double c, double sigma) {
    return c / x + std::log(x) + (x - x1) * (x - x1) / (2.0 * sigma * sigma);
}

double m_step_root(double x1, double c, double sigma) {
    if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "m-step sigma must be > 0");
    if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(x1))
        fail(ErrorKind::invalid_argument, "m-step needs finite x1 and C + |mu|^2 > 0");
    const double s2 = sigma * sigma;
    // x^3 + a x^2 + b x + d, depressed with x = t - a/3.
    const double a = -x1, b = s2, d = -s2 * c;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::array<double, 4> candidates{};
    int count = 0;
    if (disc > 0.0) {
        const double r = std::sqrt(disc);
        candidates[count++] = std::cbrt(-q / 2.0 + r) + std::cbrt(-q / 2.0 - r) - a / 3.0;
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = m > 0.0 ? std::clamp(3.0 * q / (p * m), -1.0, 1.0) : 0.0;
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            candidates[count++] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0;
    }
    candidates[count++] = bisect_positive_root(x1, s2, c);

    const double scale = std::max(1.0, std::abs(x1) * x1 * x1);
    double best = 0.0, best_obj = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        const double x = polish(candidates[k], x1, s2, c);
        if (!(x > 0.0) || std::abs(cubic(x, x1, s2, c)) > 1e-8 * scale) continue;
        const double obj = m_step_objective(x, x1, c, sigma);
        if (obj < best_obj) {
            best_obj = obj;
            best = x;
        }
    }
    if (!(best > 0.0)) fail(ErrorKind::invalid_argument, "m-step found no positive root");
    return best;
}

RealGrid m_step_prox(const RealGrid& x1, const PosteriorStats& stats, double sigma) {
    require_same_shape(x1, stats.c, "m_step_prox");
    require_same_shape(x1, stats.musq, "m_step_prox");
    RealGrid out(x1.height(), x1.width());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = m_step_root(x1[i], stats.c[i] + stats.musq[i], sigma);
    return out;
}

void mann_update(RealGrid& x1, RealGrid& x2, const RealGrid& w1, const RealGrid& w2, double rho) {
    require_same_shape(x1, x2, "mann_update");
    require_same_shape(x1, w1, "mann_update");
    require_same_shape(x1, w2, "mann_update");
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double avg = 0.5 * ((2.0 * w1[i] - x1[i]) + (2.0 * w2[i] - x2[i]));
        x1[i] += 2.0 * rho * (avg - w1[i]);
        x2[i] += 2.0 * rho * (avg - w2[i]);
    }
}

ReconResult cpnp_em(const MeasurementSet& ms, const CpnpConfig& cfg, const RealGrid* truth) {
    const auto started = Clock::now();
    cfg.validate();
    ms.validate();
    if (truth && !truth->same_shape(ms.aperture.centered()))
        fail(ErrorKind::dimension_mismatch, "truth image shape differs from the measurements");
    const double s = cfg.assumed_sigma_z.value_or(ms.sigma_z);
    if (!(s > 0.0))
        fail(ErrorKind::invalid_argument, "cpnp-em needs sigma_z > 0; supply an assumed sigma_z");
    const double sigma_z2 = s * s;

    ReconResult out;
    out.initial = initialize(ms);
    RealGrid x1 = out.initial.grid(), x2 = x1, xbar = x1;
    out.timings.initialize_s = std::chrono::duration<double>(Clock::now() - started).count();
    auto display = [](const RealGrid& g) {
        return scaled(ReflectivityImage::clamped(g).grid(), kDisplayPeak);
    };
    if (truth) {
        out.initial_psnr = psnr(*truth, display(xbar));
        out.best_psnr = out.initial_psnr;
        out.best_iteration = 0;
        out.best_estimate = out.initial;
    }

    for (int t = 0; t < cfg.iterations; ++t) {
        const auto t0 = Clock::now();
        RealGrid floored = xbar;
        for (double& v : floored) v = std::max(v, kCpnpFloor);
        const PosteriorStats stats = e_step(floored, ms, sigma_z2);
        const RealGrid w1 = m_step_prox(x1, stats, cfg.sigma);
        const auto t1 = Clock::now();
        const RealGrid w2 = apply_prior(cfg.denoiser, x2).grid();
        const auto t2 = Clock::now();
        out.timings.gradient_s += std::chrono::duration<double>(t1 - t0).count();
        out.timings.prior_s += std::chrono::duration<double>(t2 - t1).count();

        const RealGrid previous = xbar;
        mann_update(x1, x2, w1, w2, cfg.rho);
        double change2 = 0.0;
        for (std::size_t i = 0; i < xbar.size(); ++i) {
            xbar[i] = 0.5 * (x1[i] + x2[i]);
            if (!std::isfinite(xbar[i]) || std::abs(xbar[i]) > kDivergenceBound)
                fail(ErrorKind::diverged, "cpnp-em diverged at iteration " + std::to_string(t + 1));
            change2 += (xbar[i] - previous[i]) * (xbar[i] - previous[i]);
        }

        std::optional<double> p;
        if (truth) {
            p = psnr(*truth, display(xbar));
            if (*p > *out.best_psnr) {
                out.best_psnr = p;
                out.best_iteration = t + 1;
                out.best_estimate = ReflectivityImage::clamped(xbar);
            }
        }
        if (cfg.record_trajectory) {
            IterationRecord rec;
            rec.iteration = t + 1;
            rec.grad_norm = std::sqrt(change2);  // size of the x-bar update
            rec.psnr = p;
            rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            out.diagnostics.push_back(rec);
        }
    }
    out.estimate = ReflectivityImage::clamped(xbar);
    if (truth) out.final_psnr = psnr(*truth, display(xbar));
    out.timings.total_s = std::chrono::duration<double>(Clock::now() - started).count();
    return out;
}

}  // namespace speckle
