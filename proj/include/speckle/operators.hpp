#pragma once

#include "speckle/aperture.hpp"
#include "speckle/grid.hpp"

namespace speckle {

/// Square linear map on H x W complex fields, exposed only through apply().
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual int height() const = 0;
    virtual int width() const = 0;
    /// out = Op(in). `out` is resized as needed; it must not alias `in`.
    virtual void apply(const ComplexField& in, ComplexField& out) const = 0;

    ComplexField operator()(const ComplexField& in) const {
        ComplexField out;
        apply(in, out);
        return out;
    }
};

/// A = F^{-1} M F with a binary aperture mask M. Hermitian and idempotent.
class HolographicOperator final : public LinearOperator {
public:
    explicit HolographicOperator(ApertureMask aperture);

    int height() const override { return aperture_.height(); }
    int width() const override { return aperture_.width(); }
    const ApertureMask& aperture() const noexcept { return aperture_; }

    void apply(const ComplexField& in, ComplexField& out) const override;
    void apply_adjoint(const ComplexField& in, ComplexField& out) const;

    /// In-place A.
    void apply_inplace(ComplexField& field) const;

private:
    ApertureMask aperture_;
};

ComplexField apply_forward(const HolographicOperator& op, const ComplexField& field);
ComplexField apply_adjoint(const HolographicOperator& op, const ComplexField& field);

/// Sigma(x) = A diag(x) A^H + sigma_z2 I, Hermitian positive definite.
/// Holds references: `forward` must outlive this object.
class CovarianceOperator final : public LinearOperator {
public:
    CovarianceOperator(const HolographicOperator& forward, const ReflectivityImage& x,
                       double sigma_z2);

    int height() const override { return forward_->height(); }
    int width() const override { return forward_->width(); }
    const HolographicOperator& forward() const noexcept { return *forward_; }
    const ReflectivityImage& reflectivity() const noexcept { return x_; }
    double sigma_z2() const noexcept { return sigma_z2_; }

    void apply(const ComplexField& in, ComplexField& out) const override;

private:
    const HolographicOperator* forward_;
    ReflectivityImage x_;
    double sigma_z2_;
};

ComplexField apply_covariance(const CovarianceOperator& op, const ComplexField& h);

}  // namespace speckle
