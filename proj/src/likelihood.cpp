#include "speckle/likelihood.hpp"

#include <cmath>

#include "speckle/dense_oracle.hpp"

namespace speckle {
namespace {

void check_inputs(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2) {
    ms.validate();
    require_same_shape(x.grid(), ms.aperture.centered(), "likelihood");
    if (!(sigma_z2 > 0.0)) fail(ErrorKind::invalid_argument, "likelihood needs sigma_z^2 > 0");
}

}  // namespace

double nll_exact(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2) {
    check_inputs(x, ms, sigma_z2);
    const HolographicOperator forward(ms.aperture);
    const DenseOracle oracle = build_dense_oracle(forward, x, sigma_z2);
    double quad = 0.0;
    for (const auto& y : ms.measurements) {
        const Eigen::VectorXcd yv = to_vector(y);
        quad += yv.dot(oracle.solve(yv)).real();  // Eigen's dot conjugates the left side
    }
    return oracle.covariance_logdet() + quad / ms.looks();
}

RealGrid grad_exact(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2) {
    check_inputs(x, ms, sigma_z2);
    const HolographicOperator forward(ms.aperture);
    const DenseOracle oracle = build_dense_oracle(forward, x, sigma_z2);
    const Eigen::MatrixXcd inv = oracle.covariance_inverse();
    const Eigen::MatrixXcd& a = oracle.forward;
    const Eigen::MatrixXcd ah_inv = a.adjoint() * inv;
    const Eigen::VectorXcd diag = (ah_inv * a).diagonal();

    RealGrid grad(x.height(), x.width());
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = diag[static_cast<Eigen::Index>(i)].real();
    for (const auto& y : ms.measurements) {
        const Eigen::VectorXcd m = ah_inv * to_vector(y);
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad[i] -= std::norm(m[static_cast<Eigen::Index>(i)]) / ms.looks();
    }
    return grad;
}

RngStream ProbeBatch::stream(int k) const {
    return RngStream::derive(seed, StreamRole::probe, batch, static_cast<std::uint64_t>(k));
}

DiagEstimate estimate_diag(const CovarianceOperator& sigma, const ProbeBatch& probes,
                           const CGConfig& cg) {
    if (probes.count < 1) fail(ErrorKind::invalid_argument, "estimate_diag needs at least one probe");
    const HolographicOperator& forward = sigma.forward();
    const int H = sigma.height(), W = sigma.width();

    DiagEstimate out;
    out.reports.reserve(static_cast<std::size_t>(probes.count));
    ComplexField acc(H, W);
    ComplexField v(H, W);
    ComplexField w;
    for (int k = 0; k < probes.count; ++k) {
        Sampler sampler(probes.stream(k));
        for (cplx& e : v)
            e = probes.kind == ProbeKind::gaussian ? sampler.normal() : sampler.rademacher();
        ComplexField rhs;
        forward.apply(v, rhs);
        CGResult solved = cg_solve(sigma, rhs, cg);
        forward.apply_adjoint(solved.solution, w);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w[i] * v[i].real();
        out.reports.push_back(solved.report);
    }
    out.diag = RealGrid(H, W);
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const cplx avg = acc[i] / static_cast<double>(probes.count);
        out.diag[i] = avg.real();
        out.imag_residual = std::max(out.imag_residual, std::abs(avg.imag()));
    }
    return out;
}

int GradientEstimate::total_cg_iterations() const {
    int s = 0;
    for (const auto& r : probe_reports) s += r.iterations;
    for (const auto& r : look_reports) s += r.iterations;
    return s;
}

GradientEstimate grad_mc(const ReflectivityImage& x, const MeasurementSet& ms, double sigma_z2,
                         const ProbeBatch& probes, const CGConfig& cg,
                         std::vector<ComplexField>* warm) {
    check_inputs(x, ms, sigma_z2);
    const HolographicOperator forward(ms.aperture);
    const CovarianceOperator sigma(forward, x, sigma_z2);

    GradientEstimate g;
    DiagEstimate d = estimate_diag(sigma, probes, cg);
    g.diag = std::move(d.diag);
    g.probe_reports = std::move(d.reports);
    g.diag_imag_residual = d.imag_residual;
    g.probes_used = probes.count;

    const int L = ms.looks();
    if (warm != nullptr && warm->size() != static_cast<std::size_t>(L)) warm->assign(L, ComplexField());
    g.data = RealGrid(x.height(), x.width());
    ComplexField m;
    for (int l = 0; l < L; ++l) {
        const ComplexField* guess = warm != nullptr ? &(*warm)[l] : nullptr;
        CGResult solved = cg_solve(sigma, ms.measurements[l], cg, guess);
        forward.apply_adjoint(solved.solution, m);
        for (std::size_t i = 0; i < m.size(); ++i) g.data[i] += std::norm(m[i]);
        g.look_reports.push_back(solved.report);
        if (warm != nullptr) (*warm)[l] = std::move(solved.solution);
    }
    for (double& v : g.data) v /= L;

    g.value = RealGrid(x.height(), x.width());
    for (std::size_t i = 0; i < g.value.size(); ++i) g.value[i] = g.diag[i] - g.data[i];
    return g;
}

}  // namespace speckle
