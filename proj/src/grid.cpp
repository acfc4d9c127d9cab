#include "speckle/grid.hpp"

#include <cmath>

namespace speckle {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::invalid_geometry: return "invalid-geometry";
        case ErrorKind::size_limit: return "size-limit";
        case ErrorKind::cg_breakdown: return "cg-breakdown";
        case ErrorKind::factorization: return "factorization";
        case ErrorKind::diverged: return "diverged";
        case ErrorKind::io: return "io";
        case ErrorKind::format: return "format";
        case ErrorKind::external_denoiser: return "external-denoiser";
    }
    return "unknown";
}

ReflectivityImage::ReflectivityImage(RealGrid values) : grid_(std::move(values)) {
    for (double v : grid_) {
        if (!(v >= 0.0) || !std::isfinite(v))
            fail(ErrorKind::invalid_argument, "reflectivity must be finite and nonnegative");
    }
}

ReflectivityImage::ReflectivityImage(int height, int width, double fill)
    : ReflectivityImage(RealGrid(height, width, fill)) {}

ReflectivityImage ReflectivityImage::clamped(const RealGrid& values) {
    RealGrid out = values;
    for (double& v : out) {
        if (std::isnan(v))
            fail(ErrorKind::invalid_argument, "cannot clamp NaN into a reflectivity image");
        v = std::max(v, 0.0);
    }
    return ReflectivityImage(std::move(out));
}

RealGrid abs2(const ComplexField& f) {
    RealGrid out(f.height(), f.width());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(f[i]);
    return out;
}

ComplexField to_complex(const RealGrid& g) {
    ComplexField out(g.height(), g.width());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i];
    return out;
}

double norm2(const ComplexField& f) {
    double s = 0.0;
    for (const cplx& v : f) s += std::norm(v);
    return std::sqrt(s);
}

cplx inner(const ComplexField& a, const ComplexField& b) {
    require_same_shape(a, b, "inner");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs_diff(const RealGrid& a, const RealGrid& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const RealGrid& g) {
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

double mean(const RealGrid& g) {
    double s = 0.0;
    for (double v : g) s += v;
    return s / static_cast<double>(g.size());
}

RealGrid scaled(const RealGrid& g, double factor) {
    RealGrid out = g;
    for (double& v : out) v *= factor;
    return out;
}

bool all_finite(const ComplexField& f) {
    for (const cplx& v : f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

}  // namespace speckle
