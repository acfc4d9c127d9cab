#include "speckle/cg.hpp"

#include <cmath>

namespace speckle {
namespace {

double squared_norm(const ComplexField& f) {
    double s = 0.0;
    for (const cplx& v : f) s += std::norm(v);
    return s;
}

}  // namespace

void CGConfig::validate() const {
    if (!(tolerance > 0.0)) fail(ErrorKind::invalid_argument, "CG tolerance must be > 0");
    if (max_iterations < 1) fail(ErrorKind::invalid_argument, "CG needs max_iterations >= 1");
}

CGResult cg_solve(const LinearOperator& sigma, const ComplexField& b, const CGConfig& cfg,
                  const ComplexField* guess) {
    cfg.validate();
    if (b.height() != sigma.height() || b.width() != sigma.width())
        fail(ErrorKind::dimension_mismatch, "cg_solve: right-hand side shape mismatch");
    if (!all_finite(b)) fail(ErrorKind::invalid_argument, "cg_solve: right-hand side not finite");

    CGResult result;
    ComplexField& h = result.solution;
    ComplexField r = b;
    ComplexField sp;

    const bool warm = cfg.initial_guess == InitialGuess::warm_start && guess != nullptr &&
                      guess->same_shape(b);
    if (warm) {
        h = *guess;
        sigma.apply(h, sp);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sp[i];
    } else {
        h = ComplexField(b.height(), b.width());
    }

    double rr = squared_norm(r);
    const double tol2 = cfg.tolerance * cfg.tolerance;
    if (rr <= tol2) {
        result.report = {0, std::sqrt(rr), true};
        return result;
    }

    ComplexField p = r;
    for (int t = 0; t < cfg.max_iterations; ++t) {
        sigma.apply(p, sp);
        // p^H Sigma p is real for Hermitian Sigma; the imaginary part is round-off.
        const double pap = inner(p, sp).real();
        if (!(pap > 0.0) || !std::isfinite(pap))
            fail(ErrorKind::cg_breakdown, "cg_solve: p^H Sigma p <= 0 (operator not positive definite)");
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < h.size(); ++i) {
            h[i] += alpha * p[i];
            r[i] -= alpha * sp[i];
        }
        const double rr_next = squared_norm(r);
        if (rr_next <= tol2) {
            result.report = {t + 1, std::sqrt(rr_next), true};
            return result;
        }
        const double beta = rr_next / rr;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        rr = rr_next;
    }
    result.report = {cfg.max_iterations, std::sqrt(rr), false};
    return result;
}

}  // namespace speckle
