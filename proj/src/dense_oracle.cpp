#include "speckle/dense_oracle.hpp"

#include <cmath>

namespace speckle {
namespace {

void check_size(int height, int width) {
    if (static_cast<std::size_t>(height) * width > kDenseOracleMaxN)
        fail(ErrorKind::size_limit, "dense oracle is limited to n <= 4096");
}

Eigen::LLT<Eigen::MatrixXcd> factor(const Eigen::MatrixXcd& m) {
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::factorization, "covariance is not Hermitian positive definite");
    return llt;
}

}  // namespace

Eigen::VectorXcd to_vector(const ComplexField& f) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) v[static_cast<Eigen::Index>(i)] = f[i];
    return v;
}

ComplexField to_field(const Eigen::VectorXcd& v, int height, int width) {
    ComplexField f(height, width);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = v[static_cast<Eigen::Index>(i)];
    return f;
}

Eigen::MatrixXcd dense_matrix(const LinearOperator& op) {
    check_size(op.height(), op.width());
    const auto n = static_cast<Eigen::Index>(op.height()) * op.width();
    Eigen::MatrixXcd m(n, n);
    ComplexField basis(op.height(), op.width());
    ComplexField column;
    for (Eigen::Index j = 0; j < n; ++j) {
        basis[static_cast<std::size_t>(j)] = 1.0;
        op.apply(basis, column);
        m.col(j) = to_vector(column);
        basis[static_cast<std::size_t>(j)] = 0.0;
    }
    return m;
}

DenseOracle build_dense_oracle(const HolographicOperator& op, const ReflectivityImage& x,
                               double sigma_z2) {
    check_size(op.height(), op.width());
    CovarianceOperator sigma(op, x, sigma_z2);
    return DenseOracle{dense_matrix(op), dense_matrix(sigma)};
}

Eigen::MatrixXcd DenseOracle::covariance_inverse() const {
    const auto n = covariance.rows();
    return factor(covariance).solve(Eigen::MatrixXcd::Identity(n, n));
}

double DenseOracle::covariance_logdet() const {
    const auto llt = factor(covariance);
    const Eigen::MatrixXcd& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) s += 2.0 * std::log(l(i, i).real());
    return s;
}

Eigen::VectorXcd DenseOracle::solve(const Eigen::VectorXcd& b) const {
    return factor(covariance).solve(b);
}

}  // namespace speckle
