#pragma once

#include <optional>
#include <string>

#include "speckle/grid.hpp"

namespace speckle {

enum class PriorKind { clamp, median, tv, external };

/// Projection / denoising step. Images passed in are normalized (peak 1);
/// `tv_lambda` is quoted on the 0-255 display scale.
struct PriorOp {
    PriorKind kind = PriorKind::clamp;
    std::optional<double> upper;   // optional upper clamp (normalized units)
    int median_window = 3;         // odd
    double tv_lambda = 2.0;        // display units
    int tv_iterations = 50;
    std::string external_command;  // with {in} and {out} placeholders
    double external_timeout_s = 60.0;

    static PriorOp clamp() { return {}; }
    static PriorOp median(int window);
    static PriorOp tv(double lambda, int iterations = 50);
    static PriorOp external(std::string command, double timeout_s = 60.0);

    void validate() const;
    /// "clamp", "median:3", "tv:2", "external:<cmd>"
    std::string describe() const;

    bool operator==(const PriorOp&) const = default;
};

/// Parses the CLI form "clamp | median:<k> | tv:<lambda> | external:<cmd>".
PriorOp parse_prior(const std::string& text);

/// Output is always a valid ReflectivityImage. External-hook failures throw
/// external_denoiser; there is no silent fallback.
ReflectivityImage apply_prior(const PriorOp& prior, const RealGrid& s);

/// argmin_u 1/2 ||u - f||^2 + lambda TV(u) (isotropic TV, Neumann boundary),
/// by the dual projection iteration with step 1/8. No clamping.
RealGrid tv_prox(const RealGrid& f, double lambda, int iterations);

/// k x k median with replicated borders.
RealGrid median_filter(const RealGrid& f, int window);

}  // namespace speckle
