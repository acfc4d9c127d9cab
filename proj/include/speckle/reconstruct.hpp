#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "speckle/likelihood.hpp"
#include "speckle/priors.hpp"

namespace speckle {

/// Iterates whose max exceeds this are reported as diverged.
inline constexpr double kDivergenceBound = 1e6;

/// Floor under sqrt(x) in the speckle-free gradient.
inline constexpr double kSpeckleFreeFloor = 1e-6;

struct PgdConfig {
    double step_size = 0.01;
    int iterations = 150;
    int probes = 5;
    ProbeKind probe_kind = ProbeKind::gaussian;
    std::uint64_t seed = 0;  // probe seed
    CGConfig cg;
    PriorOp prior;
    bool record_trajectory = true;
    /// Noise level assumed by the model (normalized units); defaults to the
    /// bundle's sigma_z. Needed when the data were simulated noise-free.
    std::optional<double> assumed_sigma_z;

    void validate() const;
};

/// 0.01 up to 256 x 256, 0.005 above.
double default_step_size(int height, int width);

/// Speckle-free mode uses a larger step; its gradient is O(1) rather than
/// O(1/sigma_z^2).
inline constexpr double kSpeckleFreeStepSize = 0.25;

struct IterationRecord {
    int iteration = 0;
    double grad_norm = 0.0;
    int cg_iterations = 0;     // summed over all solves of this iteration
    int cg_max_iterations = 0;  // largest single solve
    bool cg_converged = true;
    double diag_imag_residual = 0.0;
    std::optional<double> psnr;
    double seconds = 0.0;
};

struct StageTimings {
    double initialize_s = 0.0;
    double gradient_s = 0.0;
    double prior_s = 0.0;
    double total_s = 0.0;
};

struct ReconResult {
    /// Normalized estimate on the measurement grid.
    ReflectivityImage estimate;
    ReflectivityImage initial;
    /// Crop baseline only: the estimate on the H' x H' grid after rescaling.
    std::optional<ReflectivityImage> cropped;
    std::vector<IterationRecord> diagnostics;  // one per iteration when recorded
    std::optional<double> initial_psnr;
    std::optional<double> final_psnr;
    std::optional<double> best_psnr;
    int best_iteration = -1;
    std::optional<ReflectivityImage> best_estimate;
    StageTimings timings;
};

/// x0 = (1/L) sum_l |A^H y_l|^2.
ReflectivityImage initialize(const MeasurementSet& ms);

/// Algorithm 2. `truth` is in display units and only feeds diagnostics.
ReconResult pgd_mc(const MeasurementSet& ms, const PgdConfig& cfg,
                   const RealGrid* truth = nullptr);

struct CropConfig {
    int size = 0;  // H'
};

/// Centered H' x W' block of the unitary spectrum, brought back to the
/// spatial domain with amplitude gain (n / n')^(1/4), so that the H'/H
/// intensity rescale maps the cropped estimate back to the input scale.
ComplexField crop_spectrum(const ComplexField& y, int crop_height, int crop_width);

/// Band-limited interpolation of a real image onto a larger grid (zero-padded
/// centered spectrum, mean preserved). Negative ringing is kept.
RealGrid spectral_upsample(const RealGrid& g, int height, int width);

/// Spectrum-cropping baseline: A = I on the cropped grid, closed-form gradient,
/// same PGD loop and prior. `estimate` is upsampled back to H x W.
ReconResult crop_reconstruct(const MeasurementSet& ms, const CropConfig& crop,
                             const PgdConfig& cfg, const RealGrid* truth = nullptr);

/// Full-aperture closed forms: 1/(x + s2) and (1/L) sum |y|^2 / (x + s2)^2.
RealGrid grad_diagonal_model(const RealGrid& x, const std::vector<ComplexField>& looks,
                             double sigma_z2);

/// -Re{A^H (y - A sqrt(x))} / sqrt(max(x, delta)).
RealGrid grad_specklefree(const ReflectivityImage& x, const ComplexField& y,
                          const HolographicOperator& forward);

/// || y - A sqrt(x) ||^2.
double specklefree_objective(const ReflectivityImage& x, const ComplexField& y,
                             const HolographicOperator& forward);

/// PGD on the speckle-free model y = A sqrt(x) + z, initialized at |A^H y|^2.
ReconResult specklefree_reconstruct(const ComplexField& y, const ApertureMask& aperture,
                                    const PgdConfig& cfg, const RealGrid* truth = nullptr);

}  // namespace speckle
