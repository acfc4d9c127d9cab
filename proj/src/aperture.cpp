#include "speckle/aperture.hpp"

#include <algorithm>
#include <cmath>

#include "speckle/fft.hpp"

namespace speckle {

ApertureSpec ApertureSpec::circular(double radius) {
    ApertureSpec s;
    s.kind = ApertureKind::circular;
    s.radius = radius;
    return s;
}

ApertureSpec ApertureSpec::annular(double outer, double inner) {
    ApertureSpec s;
    s.kind = ApertureKind::annular;
    s.radius = outer;
    s.inner_radius = inner;
    return s;
}

double pixel_radius_from_ratio(double ratio, int size) {
    if (!(ratio >= 0.0)) fail(ErrorKind::invalid_geometry, "aperture ratio must be nonnegative");
    return std::floor(ratio * size / 2.0) + 1.0;
}

ApertureSpec circular_from_ratio(int height, int width, double ratio) {
    return ApertureSpec::circular(pixel_radius_from_ratio(ratio, std::min(height, width)));
}

ApertureSpec annular_from_ratio(int height, int width, double outer_ratio, double inner_ratio) {
    const int size = std::min(height, width);
    return ApertureSpec::annular(pixel_radius_from_ratio(outer_ratio, size),
                                 pixel_radius_from_ratio(inner_ratio, size));
}

double ApertureMask::transparency() const {
    double s = 0.0;
    for (double v : centered_) s += v;
    return s / static_cast<double>(centered_.size());
}

ApertureMask make_aperture(int height, int width, const ApertureSpec& spec) {
    if (height < 1 || width < 1) fail(ErrorKind::invalid_argument, "aperture size must be positive");
    if (spec.kind == ApertureKind::custom)
        fail(ErrorKind::invalid_argument, "custom apertures are built with make_custom_aperture");
    if (spec.radius < 0.0 || spec.inner_radius < 0.0)
        fail(ErrorKind::invalid_geometry, "aperture radii must be nonnegative");
    if (spec.kind == ApertureKind::annular && spec.inner_radius >= spec.radius)
        fail(ErrorKind::invalid_geometry, "annular aperture needs inner radius < outer radius");

    ApertureMask m;
    m.spec_ = spec;
    m.center_h_ = spec.center_h.value_or(static_cast<double>(height / 2));
    m.center_w_ = spec.center_w.value_or(static_cast<double>(width / 2));
    m.spec_.center_h = m.center_h_;
    m.spec_.center_w = m.center_w_;
    m.centered_ = RealGrid(height, width, 0.0);
    for (int h = 0; h < height; ++h) {
        for (int w = 0; w < width; ++w) {
            const double d = std::hypot(h - m.center_h_, w - m.center_w_);
            bool inside = true;
            switch (spec.kind) {
                case ApertureKind::full: inside = true; break;
                case ApertureKind::circular: inside = d <= spec.radius; break;
                case ApertureKind::annular:
                    inside = d > spec.inner_radius && d <= spec.radius;
                    break;
                case ApertureKind::custom: break;
            }
            m.centered_(h, w) = inside ? 1.0 : 0.0;
        }
    }
    m.unshifted_ = ifftshift(m.centered_);
    return m;
}

ApertureMask make_custom_aperture(const RealGrid& centered_values) {
    for (double v : centered_values)
        if (v != 0.0 && v != 1.0) fail(ErrorKind::invalid_argument, "aperture mask must be binary");
    ApertureMask m;
    m.spec_.kind = ApertureKind::custom;
    m.center_h_ = static_cast<double>(centered_values.height() / 2);
    m.center_w_ = static_cast<double>(centered_values.width() / 2);
    m.spec_.center_h = m.center_h_;
    m.spec_.center_w = m.center_w_;
    m.centered_ = centered_values;
    m.unshifted_ = ifftshift(centered_values);
    return m;
}

}  // namespace speckle
