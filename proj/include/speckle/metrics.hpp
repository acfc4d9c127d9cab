#pragma once

#include <limits>

#include "speckle/grid.hpp"

namespace speckle {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE), in dB.
double psnr(const RealGrid& ref, const RealGrid& test, double peak = kDisplayPeak);

/// Mean SSIM over all 11 x 11 windows that fit inside the image (Gaussian
/// weights, std 1.5; K1 = 0.01, K2 = 0.03, dynamic range 255).
double ssim(const RealGrid& ref, const RealGrid& test);

struct MetricReport {
    double psnr = 0.0;
    double ssim = 0.0;
};

/// Both images in display units.
MetricReport evaluate(const RealGrid& ref, const RealGrid& test);

}  // namespace speckle
