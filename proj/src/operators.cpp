#include "speckle/operators.hpp"

#include "speckle/fft.hpp"

namespace speckle {

HolographicOperator::HolographicOperator(ApertureMask aperture)
    : aperture_(std::move(aperture)) {
    if (aperture_.size() == 0) fail(ErrorKind::invalid_argument, "empty aperture");
}

void HolographicOperator::apply_inplace(ComplexField& field) const {
    require_same_shape(field, aperture_.unshifted(), "apply_forward");
    dft2_inplace(field);
    const RealGrid& mask = aperture_.unshifted();
    for (std::size_t i = 0; i < field.size(); ++i) field[i] *= mask[i];
    idft2_inplace(field);
}

void HolographicOperator::apply(const ComplexField& in, ComplexField& out) const {
    out = in;
    apply_inplace(out);
}

void HolographicOperator::apply_adjoint(const ComplexField& in, ComplexField& out) const {
    // (F^{-1} M F)^H = F^H M F^{-H} = F^{-1} M F for unitary F and real M.
    apply(in, out);
}

ComplexField apply_forward(const HolographicOperator& op, const ComplexField& field) {
    ComplexField out;
    op.apply(field, out);
    return out;
}

ComplexField apply_adjoint(const HolographicOperator& op, const ComplexField& field) {
    ComplexField out;
    op.apply_adjoint(field, out);
    return out;
}

CovarianceOperator::CovarianceOperator(const HolographicOperator& forward,
                                       const ReflectivityImage& x, double sigma_z2)
    : forward_(&forward), x_(x), sigma_z2_(sigma_z2) {
    if (!(sigma_z2 > 0.0))
        fail(ErrorKind::invalid_argument,
             "covariance needs sigma_z^2 > 0 (sigma_z = 0 makes Sigma singular)");
    if (x.height() != forward.height() || x.width() != forward.width())
        fail(ErrorKind::dimension_mismatch, "reflectivity and operator shapes differ");
}

void CovarianceOperator::apply(const ComplexField& in, ComplexField& out) const {
    require_same_shape(in, x_.grid(), "apply_covariance");
    out = in;
    forward_->apply_inplace(out);
    const auto x = x_.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= x[i];
    forward_->apply_inplace(out);  // A^H = A
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sigma_z2_ * in[i];
}

ComplexField apply_covariance(const CovarianceOperator& op, const ComplexField& h) {
    ComplexField out;
    op.apply(h, out);
    return out;
}

}  // namespace speckle
