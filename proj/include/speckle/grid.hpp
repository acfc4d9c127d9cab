#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "speckle/error.hpp"

namespace speckle {

using cplx = std::complex<double>;

/// Display peak. The numerical core works on intensities normalized to peak 1;
/// images, sigma_z and prior strengths are quoted on the 0-255 display scale.
inline constexpr double kDisplayPeak = 255.0;

/// Row-major H x W array. Index (h, w) lives at h * W + w.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int height, int width, T fill = T{})
        : height_(height), width_(width) {
        if (height < 1 || width < 1)
            fail(ErrorKind::invalid_argument, "grid dimensions must be positive");
        data_.assign(static_cast<std::size_t>(height) * width, fill);
    }
    Grid(int height, int width, std::vector<T> values)
        : height_(height), width_(width), data_(std::move(values)) {
        if (height < 1 || width < 1)
            fail(ErrorKind::invalid_argument, "grid dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(height) * width)
            fail(ErrorKind::dimension_mismatch, "grid value count does not match H*W");
    }

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int h, int w) { return data_[static_cast<std::size_t>(h) * width_ + w]; }
    const T& operator()(int h, int w) const {
        return data_[static_cast<std::size_t>(h) * width_ + w];
    }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept {
        return height_ == other.height() && width_ == other.width();
    }

    bool operator==(const Grid&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

using RealGrid = Grid<double>;
using ComplexField = Grid<cplx>;

template <typename T, typename U>
void require_same_shape(const Grid<T>& a, const Grid<U>& b, const char* where) {
    if (!a.same_shape(b))
        fail(ErrorKind::dimension_mismatch,
             std::string(where) + ": shape " + std::to_string(a.height()) + "x" +
                 std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                 std::to_string(b.width()));
}

/// Nonnegative reflectivity (intensity) image.
class ReflectivityImage {
public:
    ReflectivityImage() = default;
    /// Throws invalid_argument if any value is negative or non-finite.
    explicit ReflectivityImage(RealGrid values);
    ReflectivityImage(int height, int width, double fill = 0.0);

    /// Elementwise max(v, 0); the only way to build one from unconstrained data.
    static ReflectivityImage clamped(const RealGrid& values);

    int height() const noexcept { return grid_.height(); }
    int width() const noexcept { return grid_.width(); }
    std::size_t size() const noexcept { return grid_.size(); }
    const RealGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return grid_.values(); }
    double operator[](std::size_t i) const { return grid_[i]; }

    bool operator==(const ReflectivityImage&) const = default;

private:
    RealGrid grid_;
};

RealGrid abs2(const ComplexField& f);
ComplexField to_complex(const RealGrid& g);
double norm2(const ComplexField& f);
cplx inner(const ComplexField& a, const ComplexField& b);  // a^H b
double max_abs_diff(const ComplexField& a, const ComplexField& b);
double max_abs_diff(const RealGrid& a, const RealGrid& b);
double max_abs(const RealGrid& g);
double mean(const RealGrid& g);
RealGrid scaled(const RealGrid& g, double factor);
bool all_finite(const ComplexField& f);

}  // namespace speckle
