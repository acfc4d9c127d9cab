#include "speckle/metrics.hpp"

#include <array>
#include <cmath>

namespace speckle {
namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> taps{};
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        taps[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
        total += taps[i];
    }
    for (double& t : taps) t /= total;
    return taps;
}

/// Separable 'valid' Gaussian filter.
RealGrid filter_valid(const RealGrid& g, const std::array<double, kWindow>& taps) {
    const int H = g.height(), W = g.width();
    const int oh = H - kWindow + 1, ow = W - kWindow + 1;
    RealGrid rows(H, ow);
    for (int h = 0; h < H; ++h)
        for (int w = 0; w < ow; ++w) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) s += taps[k] * g(h, w + k);
            rows(h, w) = s;
        }
    RealGrid out(oh, ow);
    for (int h = 0; h < oh; ++h)
        for (int w = 0; w < ow; ++w) {
            double s = 0.0;
            for (int k = 0; k < kWindow; ++k) s += taps[k] * rows(h + k, w);
            out(h, w) = s;
        }
    return out;
}

}  // namespace

double psnr(const RealGrid& ref, const RealGrid& test, double peak) {
    require_same_shape(ref, test, "psnr");
    double mse = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref[i] - test[i];
        mse += d * d;
    }
    mse /= static_cast<double>(ref.size());
    if (mse == 0.0) return kPsnrIdentical;
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const RealGrid& ref, const RealGrid& test) {
    require_same_shape(ref, test, "ssim");
    if (ref.height() < kWindow || ref.width() < kWindow)
        fail(ErrorKind::invalid_argument, "ssim needs images of at least 11x11");
    constexpr double c1 = (0.01 * kDisplayPeak) * (0.01 * kDisplayPeak);
    constexpr double c2 = (0.03 * kDisplayPeak) * (0.03 * kDisplayPeak);
    const auto taps = gaussian_taps();

    RealGrid xx(ref.height(), ref.width()), yy = xx, xy = xx;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        xx[i] = ref[i] * ref[i];
        yy[i] = test[i] * test[i];
        xy[i] = ref[i] * test[i];
    }
    const RealGrid mx = filter_valid(ref, taps), my = filter_valid(test, taps);
    const RealGrid sxx = filter_valid(xx, taps), syy = filter_valid(yy, taps),
                   sxy = filter_valid(xy, taps);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cxy = sxy[i] - mx[i] * my[i];
        total += (2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mx.size());
}

MetricReport evaluate(const RealGrid& ref, const RealGrid& test) {
    return {psnr(ref, test), ssim(ref, test)};
}

}  // namespace speckle
