#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"

namespace adiapass {

/// Q_N(x) = det(x I - D_N) for the symmetric tridiagonal D_N with diagonal a
/// and off-diagonal c, via Q_n = (x - a_{n-1}) Q_{n-1} - c_{n-2}^2 Q_{n-2}.
inline double tridiag_char_poly(const std::vector<double>& a, const std::vector<double>& c, double x)
{
    if (a.empty())
        return 1.0;
    if (c.size() + 1 != a.size())
        throw DomainError("tridiag_char_poly: need len(c) == len(a) - 1");
    double q_prev = 1.0;
    double q = x - a[0];
    for (std::size_t n = 2; n <= a.size(); ++n) {
        const double next = (x - a[n - 1]) * q - c[n - 2] * c[n - 2] * q_prev;
        q_prev = q;
        q = next;
    }
    return q;
}

inline double min_eigen_gap(const Eigen::MatrixXd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < ev.size(); ++i)
        gap = std::min(gap, ev[i] - ev[i - 1]);
    return gap;
}

/// Sufficient condition for N distinct eigenvalues: every off-diagonal nonzero.
inline bool assert_nondegenerate(const Eigen::MatrixXd& m)
{
    for (Eigen::Index i = 0; i + 1 < m.rows(); ++i)
        if (m(i, i + 1) == 0.0)
            return false;
    return true;
}

} // namespace adiapass
