#pragma once

#include <Eigen/Dense>

#include "speckle/operators.hpp"

namespace speckle {

inline constexpr std::size_t kDenseOracleMaxN = 4096;

/// Explicit n x n matrices of A and Sigma(x), assembled column by column from
/// the matrix-free operators. Test-scale only (n <= 4096).
struct DenseOracle {
    Eigen::MatrixXcd forward;     // A
    Eigen::MatrixXcd covariance;  // Sigma(x)

    /// Sigma^{-1} via Hermitian (Cholesky) factorization.
    Eigen::MatrixXcd covariance_inverse() const;
    /// log det Sigma from the Cholesky factor diagonal.
    double covariance_logdet() const;
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
};

/// Throws size_limit when H*W exceeds kDenseOracleMaxN.
DenseOracle build_dense_oracle(const HolographicOperator& op, const ReflectivityImage& x,
                               double sigma_z2);

/// Columns of an arbitrary operator applied to the canonical basis.
Eigen::MatrixXcd dense_matrix(const LinearOperator& op);

Eigen::VectorXcd to_vector(const ComplexField& f);
ComplexField to_field(const Eigen::VectorXcd& v, int height, int width);

}  // namespace speckle
