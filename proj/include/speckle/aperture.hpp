#pragma once

#include <cstdint>
#include <optional>

#include "speckle/grid.hpp"

namespace speckle {

enum class ApertureKind : std::uint8_t { circular = 0, annular = 1, full = 2, custom = 3 };

/// Aperture geometry in centered frequency coordinates (pixels).
struct ApertureSpec {
    ApertureKind kind = ApertureKind::full;
    std::optional<double> center_h;  // default floor(H/2)
    std::optional<double> center_w;  // default floor(W/2)
    double radius = 0.0;
    double inner_radius = 0.0;  // annular only

    static ApertureSpec full() { return {}; }
    static ApertureSpec circular(double radius);
    static ApertureSpec annular(double outer, double inner);
};

/// Pixel radius for a diameter ratio 2r/size: floor(ratio * size / 2) + 1.
/// This discretization reproduces the published transparency rates
/// (0.796 for ratio 1.0 and 0.508 for ratio 0.8 at 256x256).
double pixel_radius_from_ratio(double ratio, int size);

ApertureSpec circular_from_ratio(int height, int width, double ratio);
ApertureSpec annular_from_ratio(int height, int width, double outer_ratio, double inner_ratio);

/// Ratio of the annular preset whose transparency is ~0.704 at 256x256 with
/// an outer ratio of 1.0.
inline constexpr double kAnnularInnerRatio = 0.34;

/// Binary frequency mask. `centered()` holds P with the origin at the center;
/// `unshifted()` is the same mask moved to FFT order and is what the
/// operators multiply with.
class ApertureMask {
public:
    ApertureMask() = default;

    int height() const noexcept { return centered_.height(); }
    int width() const noexcept { return centered_.width(); }
    std::size_t size() const noexcept { return centered_.size(); }
    const ApertureSpec& spec() const noexcept { return spec_; }
    const RealGrid& centered() const noexcept { return centered_; }
    const RealGrid& unshifted() const noexcept { return unshifted_; }

    /// Fraction of passed frequencies.
    double transparency() const;
    double center_h() const noexcept { return center_h_; }
    double center_w() const noexcept { return center_w_; }

    friend ApertureMask make_aperture(int, int, const ApertureSpec&);
    friend ApertureMask make_custom_aperture(const RealGrid&);

private:
    ApertureSpec spec_;
    double center_h_ = 0.0;
    double center_w_ = 0.0;
    RealGrid centered_;
    RealGrid unshifted_;
};

/// Throws invalid_geometry on negative radii or inner >= outer for annuli.
ApertureMask make_aperture(int height, int width, const ApertureSpec& spec);

/// Mask given directly in centered coordinates; values must be 0 or 1.
ApertureMask make_custom_aperture(const RealGrid& centered_values);

}  // namespace speckle
