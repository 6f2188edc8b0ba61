#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "branches.hpp"
#include "control.hpp"
#include "error.hpp"
#include "ladder.hpp"
#include "linalg.hpp"

namespace adiapass {

enum class Scheme {
    midpoint, // exp(-i h/eps H(s + h/2))
    magnus4   // two-point Gauss-Legendre Magnus, fourth order
};

struct SimulationConfig {
    double epsilon = 1e-3;
    int n_steps = 0; // 0: auto
    double tolerance_unitarity = 1e-10;
    bool check_convergence = false;
    double convergence_tolerance = 1e-6;
    Scheme scheme = Scheme::midpoint;

    // at least max(2000, 20/eps); the midpoint rule needs about twice that to keep
    // the step-halving difference below 1e-6 at eps = 1e-3
    static int auto_steps(double eps) { return std::max(20000, static_cast<int>(std::ceil(40.0 / eps))); }

    int steps() const { return n_steps > 0 ? n_steps : auto_steps(epsilon); }

    void validate() const
    {
        if (!(epsilon > 0.0))
            throw DomainError("epsilon must be positive");
        if (n_steps < 0)
            throw DomainError("n_steps must be non-negative");
    }
};

struct PropagatorTrajectory {
    std::vector<double> grid;              // checkpoint times, always ends with 1
    std::vector<Eigen::MatrixXcd> unitaries;
    double unitarity_defect = 0.0;
    int n_steps = 0;
    std::optional<double> halving_difference; // max |U_n(1) - U_2n(1)| when checked

    const Eigen::MatrixXcd& final() const { return unitaries.back(); }
};

namespace detail {

inline std::string sci(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", x);
    return b;
}

inline std::vector<int> checkpoint_steps(const std::vector<double>& checkpoints, int n)
{
    std::vector<int> idx{0};
    for (double s : checkpoints) {
        if (!(s >= 0.0 && s <= 1.0))
            throw DomainError("checkpoint outside [0,1]");
        idx.push_back(static_cast<int>(std::lround(s * n)));
    }
    idx.push_back(n);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

inline Eigen::MatrixXcd expm_i(const Eigen::MatrixXd& h, double t) { return expm_i_symmetric(h, t); }
inline Eigen::MatrixXcd expm_i(const Eigen::MatrixXcd& h, double t) { return expm_i_hermitian(h, t); }

/// One-step driver; hfun(s) returns a real symmetric or complex Hermitian H(s).
template <class HFun>
PropagatorTrajectory propagate(int dim, HFun&& hfun, double eps, int n, Scheme scheme,
                               const std::vector<double>& checkpoints)
{
    const auto idx = checkpoint_steps(checkpoints, n);
    PropagatorTrajectory tr;
    tr.n_steps = n;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    const double h = 1.0 / n;
    const double tau = h / eps;
    const double c = std::sqrt(3.0) / 6.0;
    std::size_t next = 0;
    for (int i = 0; i <= n; ++i) {
        if (next < idx.size() && idx[next] == i) {
            tr.grid.push_back(static_cast<double>(i) / n);
            tr.unitaries.push_back(u);
            tr.unitarity_defect = std::max(tr.unitarity_defect, unitarity_defect(u));
            ++next;
        }
        if (i == n)
            break;
        const double s = i * h;
        if (scheme == Scheme::midpoint) {
            u = expm_i(hfun(s + 0.5 * h), tau) * u;
        } else {
            const auto h1 = hfun(s + (0.5 - c) * h);
            const auto h2 = hfun(s + (0.5 + c) * h);
            const Eigen::MatrixXcd comm = (h2 * h1 - h1 * h2).template cast<cplx>();
            const Eigen::MatrixXcd k = (0.5 * (h1 + h2)).template cast<cplx>()
                - cplx(0.0, std::sqrt(3.0) / 12.0 * tau) * comm;
            u = expm_i_hermitian(k, tau) * u;
        }
    }
    return tr;
}

} // namespace detail

/// Propagator of i eps dU/ds = H(s) U, U(0) = I, sampled at `checkpoints` and s = 1.
template <Control C>
PropagatorTrajectory integrate_u(const LadderSystem& sys, const C& control, const SimulationConfig& cfg,
                                 const std::vector<double>& checkpoints = {})
{
    cfg.validate();
    auto hfun = [&](double s) { return assemble_h(sys, control.omega(s), control.amplitude(s)); };
    const int n = cfg.steps();
    PropagatorTrajectory tr = detail::propagate(sys.n_levels, hfun, cfg.epsilon, n, cfg.scheme, checkpoints);
    if (tr.unitarity_defect > cfg.tolerance_unitarity)
        throw ConvergenceError("unitarity defect " + std::to_string(tr.unitarity_defect) + " exceeds tolerance");
    if (cfg.check_convergence) {
        // an auto step count is doubled (up to 16x) until halving agrees; a configured one is not
        const int max_doublings = cfg.n_steps > 0 ? 0 : 4;
        for (int d = 0;; ++d) {
            auto fine = detail::propagate(sys.n_levels, hfun, cfg.epsilon, 2 * tr.n_steps, cfg.scheme, checkpoints);
            const double diff = max_abs_diff(tr.final(), fine.final());
            if (diff <= cfg.convergence_tolerance) {
                tr.halving_difference = diff;
                break;
            }
            if (d == max_doublings)
                throw ConvergenceError("step-halving check failed: |U_n(1) - U_2n(1)| = " + detail::sci(diff)
                                       + " at n_steps = " + std::to_string(tr.n_steps));
            if (fine.unitarity_defect > cfg.tolerance_unitarity)
                throw ConvergenceError("unitarity defect " + std::to_string(fine.unitarity_defect)
                                       + " exceeds tolerance");
            tr = std::move(fine);
        }
    }
    return tr;
}

/// Projector onto the analytic branch k of H(s); rank bookkeeping follows the
/// designed crossings of the control.
class BranchProjector {
public:
    BranchProjector(const LadderSystem& sys, const ControlProfile& control, int k)
        : sys_(sys), control_(control), k_(k)
    {
        if (k < 0 || k >= sys.n_levels)
            throw DomainError("branch index out of range");
        const CrossingSet cs = crossing_set(sys, control.chirp, false);
        events_ = trace_crossings(sys, cs, designated_pairs(cs, control.amp)).events;
    }

    int rank_at(double s) const
    {
        std::vector<int> rank_of(sys_.n_levels);
        std::iota(rank_of.begin(), rank_of.end(), 0);
        for (const auto& e : events_)
            if (e.s < s)
                std::swap(rank_of[e.branch_low], rank_of[e.branch_high]);
        return rank_of[k_];
    }

    Eigen::MatrixXd operator()(double s) const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_h(sys_, control_.omega(s), control_.amplitude(s)));
        const Eigen::VectorXd v = es.eigenvectors().col(rank_at(s));
        return v * v.transpose();
    }

    /// P and dP/ds, the latter from first-order perturbation theory:
    /// dP = sum_{j != r} (v_j v_j^T H' v_r v_r^T + transpose) / (lambda_r - lambda_j).
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> with_derivative(double s) const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_h(sys_, control_.omega(s), control_.amplitude(s)));
        const int r = rank_at(s);
        const Eigen::MatrixXd& v = es.eigenvectors();
        const Eigen::VectorXd vr = v.col(r);
        Eigen::MatrixXd dh = control_.amplitude_prime(s) * build_h1(sys_);
        for (int k = 0; k < sys_.n_levels; ++k)
            dh(k, k) = -k * control_.omega_prime(s);
        const Eigen::VectorXd hv = dh * vr;
        Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(sys_.n_levels, sys_.n_levels);
        for (int j = 0; j < sys_.n_levels; ++j) {
            if (j == r)
                continue;
            const double gap = es.eigenvalues()[r] - es.eigenvalues()[j];
            if (std::abs(gap) < 1e-12)
                throw DomainError("branch projector derivative at a degeneracy, s = " + std::to_string(s));
            const Eigen::VectorXd vj = v.col(j);
            const Eigen::MatrixXd t = vj * (vj.dot(hv) / gap) * vr.transpose();
            dp += t + t.transpose();
        }
        return {vr * vr.transpose(), dp};
    }

private:
    const LadderSystem& sys_;
    const ControlProfile& control_;
    int k_;
    std::vector<SwapEvent> events_;
};

struct AdiabaticResult {
    PropagatorTrajectory trajectory;
    double intertwining = 0.0; // max over checkpoints of |U_a P_k(0) U_a^dagger - P_k(s)|_F
};

/// Propagator of H_a = H - i eps [P, dP/ds] for branch k, which carries P_k(0) onto
/// P_k(s) exactly.
inline AdiabaticResult adiabatic_propagator(const LadderSystem& sys, const ControlProfile& control,
                                            const SimulationConfig& cfg, int k,
                                            const std::vector<double>& checkpoints = {},
                                            double intertwining_tolerance = 1e-4)
{
    cfg.validate();
    const BranchProjector proj(sys, control, k);
    auto hfun = [&](double s) -> Eigen::MatrixXcd {
        const auto [p, dp] = proj.with_derivative(s);
        const Eigen::MatrixXd comm = p * dp - dp * p;
        return assemble_h(sys, control.omega(s), control.amplitude(s)).cast<cplx>()
            - cplx(0.0, cfg.epsilon) * comm.cast<cplx>();
    };
    AdiabaticResult res;
    res.trajectory = detail::propagate(sys.n_levels, hfun, cfg.epsilon, cfg.steps(), cfg.scheme, checkpoints);
    const Eigen::MatrixXcd p0 = proj(0.0).cast<cplx>();
    for (std::size_t i = 0; i < res.trajectory.grid.size(); ++i) {
        const auto& u = res.trajectory.unitaries[i];
        const Eigen::MatrixXcd moved = u * p0 * u.adjoint();
        res.intertwining
            = std::max(res.intertwining, (moved - proj(res.trajectory.grid[i]).cast<cplx>()).norm());
    }
    if (res.intertwining > intertwining_tolerance)
        throw IntertwiningError("adiabatic propagator misses the branch projector by "
                                + std::to_string(res.intertwining) + "; refine fd_step or n_steps");
    return res;
}

/// || U P_k U^dagger - P_target ||_F
inline double transfer_fidelity(const Eigen::MatrixXcd& u, int k, int target)
{
    const Eigen::VectorXcd col = u.col(k);
    Eigen::MatrixXcd d = col * col.adjoint();
    d(target, target) -= 1.0;
    return d.norm();
}

/// sqrt(2 - 2 |<target|U|k>|^2), equal to transfer_fidelity for unitary U.
inline double transfer_fidelity_closed_form(const Eigen::MatrixXcd& u, int k, int target)
{
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::norm(u(target, k))));
}

/// max over entries of | |U_ij|^2 - [sigma(j) == i] |
inline double permutation_deviation(const Eigen::MatrixXcd& u, const std::vector<int>& sigma)
{
    double d = 0.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r)
        for (Eigen::Index c = 0; c < u.cols(); ++c)
            d = std::max(d, std::abs(std::norm(u(r, c)) - (sigma[c] == r ? 1.0 : 0.0)));
    return d;
}

} // namespace adiapass
