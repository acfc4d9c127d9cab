#include <cmath>

#include "oracles.hpp"
#include "speckle/dense_oracle.hpp"
#include "speckle/operators.hpp"
#include "support.hpp"

using namespace speckle;

namespace {

double vec_diff(const ComplexField& a, const Eigen::VectorXcd& b) {
    return (oracle::vec(a) - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("matrix-free A, A^H and Sigma match matrices built from the DFT definition") {
    for (const ApertureSpec& spec :
         {ApertureSpec::full(), ApertureSpec::circular(2.5), ApertureSpec::annular(3.5, 1.0)}) {
        const ApertureMask ap = make_aperture(8, 8, spec);
        const HolographicOperator op(ap);
        const Eigen::MatrixXcd a = oracle::forward_matrix(ap);
        const RealGrid xv = oracle::random_image(8, 8, 5, 0.0, 2.0);
        const CovarianceOperator sigma(op, ReflectivityImage(xv), 0.3);
        const Eigen::MatrixXcd s = oracle::covariance_matrix(a, xv, 0.3);
        for (std::uint64_t t = 0; t < 20; ++t) {
            const ComplexField u = oracle::random_field(8, 8, t);
            CHECK(vec_diff(apply_forward(op, u), a * oracle::vec(u)) < 1e-10);
            CHECK(vec_diff(apply_adjoint(op, u), a.adjoint() * oracle::vec(u)) < 1e-10);
            CHECK(vec_diff(apply_covariance(sigma, u), s * oracle::vec(u)) < 1e-10);
        }
    }
}

TEST_CASE("A is a Hermitian orthogonal projector") {
    const ApertureMask ap = make_aperture(32, 32, circular_from_ratio(32, 32, 0.8));
    const HolographicOperator op(ap);
    for (std::uint64_t t = 0; t < 5; ++t) {
        const ComplexField u = oracle::random_field(32, 32, 2 * t);
        const ComplexField v = oracle::random_field(32, 32, 2 * t + 1);
        const ComplexField au = apply_forward(op, u);
        const cplx lhs = inner(au, v);
        const cplx rhs = inner(u, apply_forward(op, v));
        CHECK(std::abs(lhs - rhs) / std::sqrt(norm2(u) * norm2(v)) < 1e-12);
        CHECK(max_abs_diff(apply_forward(op, au), au) < 1e-12);
        ComplexField inplace = u;
        op.apply_inplace(inplace);
        CHECK(max_abs_diff(inplace, au) == 0.0);
    }
}

TEST_CASE("Sigma is Hermitian positive definite with smallest eigenvalue sigma^2") {
    const ApertureMask ap = make_aperture(6, 6, ApertureSpec::circular(1.5));
    const HolographicOperator op(ap);
    const CovarianceOperator sigma(op, ReflectivityImage(oracle::random_image(6, 6, 8, 0.0, 1.0)), 0.05);
    const Eigen::MatrixXcd m = dense_matrix(sigma);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m).eigenvalues();
    CHECK(ev.minCoeff() == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("dense oracle agrees with the independent matrices and enforces its size limit") {
    const ApertureMask ap = make_aperture(4, 4, ApertureSpec::circular(1.0));
    const HolographicOperator op(ap);
    const RealGrid xv = oracle::random_image(4, 4, 3, 0.1, 1.0);
    const DenseOracle d = build_dense_oracle(op, ReflectivityImage(xv), 0.2);
    const Eigen::MatrixXcd s = oracle::covariance_matrix(oracle::forward_matrix(ap), xv, 0.2);
    CHECK((d.covariance - s).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.covariance_logdet() == doctest::Approx(std::log(s.determinant().real())).epsilon(1e-10));

    const HolographicOperator big(make_aperture(65, 64, ApertureSpec::full()));
    CHECK_THROWS_KIND(dense_matrix(big), ErrorKind::size_limit);
}

TEST_CASE("operator inputs are validated") {
    const HolographicOperator op(make_aperture(4, 4, ApertureSpec::full()));
    CHECK_THROWS_KIND(CovarianceOperator(op, ReflectivityImage(4, 4, 1.0), 0.0), ErrorKind::invalid_argument);
    CHECK_THROWS_KIND(CovarianceOperator(op, ReflectivityImage(3, 4, 1.0), 0.1), ErrorKind::dimension_mismatch);
    ComplexField out;
    CHECK_THROWS_KIND(op.apply(ComplexField(4, 5), out), ErrorKind::dimension_mismatch);
}
