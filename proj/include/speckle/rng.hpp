#pragma once

#include <cstdint>
#include <random>

namespace speckle {

/// Roles keep the speckle, noise and probe draws of one master seed disjoint.
enum class StreamRole : std::uint64_t {
    speckle = 1,
    noise = 2,
    probe = 3,
    specklefree_noise = 4,
};

/// (master seed, stream id) fully determines the draws.
struct RngStream {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    static RngStream derive(std::uint64_t master, StreamRole role, std::uint64_t a,
                            std::uint64_t b = 0);
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Standard normal and Rademacher draws from one stream. Built on
/// std::mt19937_64 (bit-exact across standard libraries) with our own
/// uniform and Box-Muller transforms, since std distributions are
/// implementation-defined.
class Sampler {
public:
    explicit Sampler(RngStream stream);

    double uniform();  // (0, 1)
    double normal();
    double rademacher();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace speckle
