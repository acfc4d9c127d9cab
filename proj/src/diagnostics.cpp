#include "speckle/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

namespace speckle {
namespace {

using nlohmann::json;

/// JSON has no infinity; identical images report psnr as the string "inf".
json psnr_value(const std::optional<double>& p) {
    if (!p) return nullptr;
    if (std::isinf(*p)) return "inf";
    return *p;
}

}  // namespace

std::string diagnostics_ndjson(const ReconResult& r, const std::string& algorithm) {
    std::string out;
    for (const IterationRecord& rec : r.diagnostics) {
        const json line = {{"type", "iteration"},
                           {"algorithm", algorithm},
                           {"iteration", rec.iteration},
                           {"grad_norm", rec.grad_norm},
                           {"cg_iterations", rec.cg_iterations},
                           {"cg_max_iterations", rec.cg_max_iterations},
                           {"cg_converged", rec.cg_converged},
                           {"diag_imag_residual", rec.diag_imag_residual},
                           {"psnr", psnr_value(rec.psnr)},
                           {"seconds", rec.seconds}};
        out += line.dump() + '\n';
    }
    const json summary = {{"type", "summary"},
                          {"algorithm", algorithm},
                          {"height", r.estimate.height()},
                          {"width", r.estimate.width()},
                          {"initial_psnr", psnr_value(r.initial_psnr)},
                          {"final_psnr", psnr_value(r.final_psnr)},
                          {"best_psnr", psnr_value(r.best_psnr)},
                          {"best_iteration", r.best_iteration},
                          {"timings",
                           {{"initialize_s", r.timings.initialize_s},
                            {"gradient_s", r.timings.gradient_s},
                            {"prior_s", r.timings.prior_s},
                            {"total_s", r.timings.total_s}}}};
    out += summary.dump() + '\n';
    return out;
}

void write_diagnostics(const std::filesystem::path& path, const ReconResult& result,
                       const std::string& algorithm) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write diagnostics " + path.string());
    out << diagnostics_ndjson(result, algorithm);
}

}  // namespace speckle
