#include "speckle/speckle_sim.hpp"

#include <cmath>

#include "speckle/operators.hpp"

namespace speckle {
namespace {

void add_noise(ComplexField& field, double sigma_z, RngStream stream) {
    if (sigma_z == 0.0) return;
    Sampler sampler(stream);
    const double s = sigma_z / std::sqrt(2.0);
    for (cplx& v : field) {
        const double a = sampler.normal();
        const double b = sampler.normal();
        v += cplx(s * a, s * b);
    }
}

}  // namespace

void MeasurementSet::validate() const {
    if (measurements.empty()) fail(ErrorKind::invalid_argument, "measurement set has no looks");
    if (!(sigma_z >= 0.0)) fail(ErrorKind::invalid_argument, "sigma_z must be >= 0");
    for (const auto& y : measurements) require_same_shape(y, aperture.centered(), "MeasurementSet");
}

ComplexField sample_speckle_field(const ReflectivityImage& x, RngStream stream) {
    Sampler sampler(stream);
    ComplexField g(x.height(), x.width());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = std::sqrt(x[i] / 2.0);
        const double a = sampler.normal();
        const double b = sampler.normal();
        g[i] = cplx(s * a, s * b);
    }
    return g;
}

MeasurementSet simulate_measurements(const ReflectivityImage& x, const ApertureMask& aperture,
                                     double sigma_z, int looks, std::uint64_t seed) {
    if (looks < 1) fail(ErrorKind::invalid_argument, "need at least one look");
    if (!(sigma_z >= 0.0)) fail(ErrorKind::invalid_argument, "sigma_z must be >= 0");
    require_same_shape(x.grid(), aperture.centered(), "simulate_measurements");

    const HolographicOperator forward(aperture);
    MeasurementSet set;
    set.sigma_z = sigma_z;
    set.aperture = aperture;
    set.seed = seed;
    set.measurements.reserve(static_cast<std::size_t>(looks));
    for (int l = 0; l < looks; ++l) {
        const auto look = static_cast<std::uint64_t>(l);
        ComplexField y =
            sample_speckle_field(x, RngStream::derive(seed, StreamRole::speckle, look));
        forward.apply_inplace(y);
        add_noise(y, sigma_z, RngStream::derive(seed, StreamRole::noise, look));
        set.measurements.push_back(std::move(y));
    }
    return set;
}

ComplexField simulate_specklefree(const ReflectivityImage& x, const ApertureMask& aperture,
                                  double sigma_z, std::uint64_t seed) {
    if (!(sigma_z >= 0.0)) fail(ErrorKind::invalid_argument, "sigma_z must be >= 0");
    require_same_shape(x.grid(), aperture.centered(), "simulate_specklefree");
    ComplexField y(x.height(), x.width());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sqrt(x[i]);
    HolographicOperator(aperture).apply_inplace(y);
    add_noise(y, sigma_z, RngStream::derive(seed, StreamRole::specklefree_noise, 0));
    return y;
}

}  // namespace speckle
