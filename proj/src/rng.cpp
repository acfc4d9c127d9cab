#include "speckle/rng.hpp"

#include <cmath>
#include <numbers>

namespace speckle {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream RngStream::derive(std::uint64_t master, StreamRole role, std::uint64_t a,
                            std::uint64_t b) {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(role));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b * 0xd6e8feb86659fd93ULL));
    return {master, h};
}

Sampler::Sampler(RngStream stream)
    : engine_(splitmix64(stream.master ^ splitmix64(stream.stream))) {}

double Sampler::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Sampler::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double Sampler::rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

}  // namespace speckle
