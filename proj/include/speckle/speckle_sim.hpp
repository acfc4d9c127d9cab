#pragma once

#include <cstdint>
#include <vector>

#include "speckle/aperture.hpp"
#include "speckle/rng.hpp"

namespace speckle {

/// L looks y_l = A g_l + z_l of one scene. sigma_z is in the same
/// (normalized) units as the fields.
struct MeasurementSet {
    std::vector<ComplexField> measurements;
    double sigma_z = 0.0;
    ApertureMask aperture;
    std::uint64_t seed = 0;

    int looks() const noexcept { return static_cast<int>(measurements.size()); }
    int height() const noexcept { return aperture.height(); }
    int width() const noexcept { return aperture.width(); }

    /// Throws if looks are missing or shapes disagree with the aperture.
    void validate() const;
};

/// g_i = sqrt(x_i / 2) (a_i + i b_i) with a, b standard normal: CN(0, diag(x)).
ComplexField sample_speckle_field(const ReflectivityImage& x, RngStream stream);

/// Each look draws g_l and z_l from their own derived streams, so the result is
/// a pure function of the arguments.
MeasurementSet simulate_measurements(const ReflectivityImage& x, const ApertureMask& aperture,
                                     double sigma_z, int looks, std::uint64_t seed);

/// Speckle-free reference model y = A sqrt(x) + z.
ComplexField simulate_specklefree(const ReflectivityImage& x, const ApertureMask& aperture,
                                  double sigma_z, std::uint64_t seed);

}  // namespace speckle
