#pragma once

#include <filesystem>
#include <string>

#include "speckle/speckle_sim.hpp"

namespace speckle {

namespace fs = std::filesystem;

// Measurement bundle, little-endian:
//   "SPKL1\0"
//   u32 H, u32 W, u32 L
//   f64 sigma_z
//   u8 aperture kind, f64 center_h, f64 center_w, f64 radius, f64 inner_radius
//   u64 seed
//   L x (H*W interleaved f64 re, im), row-major
//   [custom apertures only] H*W u8 centered mask values
void write_bundle(const fs::path& path, const MeasurementSet& ms);
MeasurementSet read_bundle(const fs::path& path);

/// Binary PGM (P5), 8- or 16-bit (16-bit samples are big-endian), or ASCII P2.
/// Returns display-scale values rescaled to 0-255 when maxval != 255.
RealGrid read_pgm(const fs::path& path);
/// 8-bit P5, values rounded and clipped to [0, 255].
void write_pgm(const fs::path& path, const RealGrid& display);

/// f32 row-major little-endian raw plus a JSON sidecar at "<path>.json"
/// carrying {height, width, dtype: "f32", scale}; display = value * scale.
struct RawImage {
    RealGrid values;
    double scale = 1.0;
};
void write_raw(const fs::path& path, const RealGrid& values, double scale);
/// Reads the sidecar when present; otherwise needs expected_height/width.
RawImage read_raw(const fs::path& path, int expected_height = 0, int expected_width = 0);
fs::path sidecar_path(const fs::path& raw);

/// Writes a normalized estimate as raw (scale 255) + sidecar + 8-bit preview
/// "<stem>.pgm" next to it.
void write_estimate(const fs::path& raw_path, const ReflectivityImage& normalized);

/// Loads a truth/reference image for metrics in display units: .pgm, or .raw
/// with sidecar (values times scale).
RealGrid read_display_image(const fs::path& path);

}  // namespace speckle
