#pragma once

#include <Eigen/Dense>

#include <complex>

namespace adiapass {

using cplx = std::complex<double>;

/// exp(-i t H) for real symmetric H.
inline Eigen::MatrixXcd expm_i_symmetric(const Eigen::MatrixXd& h, double t)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXcd ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp();
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    return v * ph.asDiagonal() * v.adjoint();
}

/// exp(-i t H) for complex Hermitian H.
inline Eigen::MatrixXcd expm_i_hermitian(const Eigen::MatrixXcd& h, double t)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXcd ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

/// Frobenius norm of U^dagger U - I.
inline double unitarity_defect(const Eigen::MatrixXcd& u)
{
    return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.cols(), u.cols())).norm();
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

inline Eigen::MatrixXd populations(const Eigen::MatrixXcd& u)
{
    return u.cwiseAbs2();
}

} // namespace adiapass
