#pragma once

#include <optional>

#include "speckle/reconstruct.hpp"

namespace speckle {

/// x-bar is floored here before the E-step so that C + |mu|^2 stays positive.
inline constexpr double kCpnpFloor = 1e-12;

struct CpnpConfig {
    int iterations = 50;
    double sigma = 0.1;  // proximal strength
    double rho = 0.2;    // Mann rate
    PriorOp denoiser;
    /// Defaults to the bundle's sigma_z (normalized units).
    std::optional<double> assumed_sigma_z;
    bool record_trajectory = true;

    void validate() const;
};

struct PosteriorStats {
    RealGrid c;     // C_ii
    RealGrid musq;  // |mu_i|^2, averaged over looks
};

/// E-step under A^H A ~ I.
PosteriorStats e_step(const RealGrid& xbar, const MeasurementSet& ms, double sigma_z2);

/// Positive root of x^3 - x1 x^2 + sigma^2 x - sigma^2 c = 0 minimizing
/// c/x + log x + (x - x1)^2 / (2 sigma^2). Throws invalid_argument when c <= 0.
double m_step_root(double x1, double c, double sigma);

/// Coordinatewise m_step_root with c = C + musq.
RealGrid m_step_prox(const RealGrid& x1, const PosteriorStats& stats, double sigma);

/// Per-coordinate M-step objective.
double m_step_objective(double x, double x1, double c, double sigma);

/// x_j <- x_j + 2 rho (mean_k(2 w_k - x_k) - w_j) for the two agents.
void mann_update(RealGrid& x1, RealGrid& x2, const RealGrid& w1, const RealGrid& w2, double rho);

/// Algorithm 3. The estimate is x-bar after the last update; with a truth
/// image the best-PSNR iterate is kept too.
ReconResult cpnp_em(const MeasurementSet& ms, const CpnpConfig& cfg,
                    const RealGrid* truth = nullptr);

}  // namespace speckle
