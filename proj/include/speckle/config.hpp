#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "speckle/cpnp_em.hpp"

namespace speckle {

enum class Algorithm { pgd_mc, cpnp_em, crop, specklefree };

Algorithm parse_algorithm(const std::string& text);  // pgd-mc|cpnp-em|crop|specklefree
std::string to_string(Algorithm algo);

/// "circ:<2r/H>", "annulus:<outer>:<inner>" or "full".
ApertureSpec parse_aperture(const std::string& text, int height, int width);

/// Everything a CLI run needs. Noise levels are in display units here.
/// JSON layout:
///   {"algorithm": "pgd-mc",
///    "simulate": {"aperture", "sigma_z", "looks", "seed"},
///    "pgd_mc": {"step_size" (null = by size), "iterations", "probes", "probe_kind",
///               "probe_seed", "record_trajectory", "assumed_sigma_z" (null = bundle)},
///    "cg": {"tolerance", "max_iterations", "warm_start"},
///    "prior": {"kind", "upper", "median_window", "tv_lambda", "tv_iterations",
///              "external_command", "external_timeout_s"},
///    "cpnp_em": {"iterations", "sigma", "rho"},
///    "crop": {"size" (0 = H/2)},
///    "specklefree": {"step_size"}}
struct RunConfig {
    Algorithm algorithm = Algorithm::pgd_mc;

    std::string aperture = "circ:1.0";
    double sigma_z = 25.0;
    int looks = 4;
    std::uint64_t seed = 0;

    std::optional<double> step_size;
    int iterations = 150;
    int probes = 5;
    ProbeKind probe_kind = ProbeKind::gaussian;
    std::uint64_t probe_seed = 0;
    bool record_trajectory = true;
    std::optional<double> assumed_sigma_z;

    CGConfig cg;
    PriorOp prior = PriorOp::tv(2.0);

    int cpnp_iterations = 50;
    double cpnp_sigma = 0.1;
    double cpnp_rho = 0.2;

    int crop_size = 0;

    double specklefree_step_size = kSpeckleFreeStepSize;

    bool operator==(const RunConfig&) const = default;
};

std::string to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& cfg);

PgdConfig make_pgd_config(const RunConfig& cfg, int height, int width);
PgdConfig make_specklefree_config(const RunConfig& cfg);
CpnpConfig make_cpnp_config(const RunConfig& cfg);

}  // namespace speckle
