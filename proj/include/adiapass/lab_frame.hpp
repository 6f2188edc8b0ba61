#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "control.hpp"
#include "error.hpp"
#include "ladder.hpp"
#include "linalg.hpp"
#include "propagator.hpp"

namespace adiapass {

struct LabFrameOptions {
    int initial_level = 0;
    int samples_per_period = 64; // steps per 2 pi / omega0
    double separation_factor = 10.0;
};

struct LabFrameReport {
    double omega0 = 0.0;
    std::vector<double> checkpoints;
    std::vector<std::vector<double>> lab_populations; // [checkpoint][level]
    std::vector<std::vector<double>> rwa_populations;
    double max_discrepancy = 0.0;   // over all checkpoints (includes carrier micromotion)
    double final_discrepancy = 0.0; // at s = 1
    long long lab_steps = 0;
};

/// Drive of the physical system: u(t) = 2 A(eps t) cos(omega0 t + theta(eps t) / eps).
inline double lab_drive(const ControlProfile& control, double omega0, double eps, double t)
{
    const double s = std::clamp(eps * t, 0.0, 1.0);
    return 2.0 * control.amplitude(s) * std::cos(omega0 * t + control.theta(s) / eps);
}

/// Integrates i d/dt psi = (H_0 + u(t) H_1) psi over t in [0, 1/eps] from |initial_level>,
/// moves the state to the rotating frame at each checkpoint and compares populations with
/// the slow-time propagator.
inline LabFrameReport lab_frame_validate(const LadderSystem& sys, const ControlProfile& control,
                                         const SimulationConfig& cfg, const std::vector<double>& rwa_checkpoints,
                                         const LabFrameOptions& opt = {})
{
    cfg.validate();
    const int n = sys.n_levels;
    if (opt.initial_level < 0 || opt.initial_level >= n)
        throw DomainError("initial level out of range");

    double drive = 0.0;
    for (int i = 0; i <= 1000; ++i)
        drive = std::max(drive, std::abs(control.amplitude(i / 1000.0)));
    double mu_max = 0.0;
    for (double m : sys.mus)
        mu_max = std::max(mu_max, m);
    const double scale = std::max(sys.max_abs_delta(), drive * mu_max);
    if (sys.omega0 < opt.separation_factor * scale)
        throw ScaleSeparationError("omega0 = " + std::to_string(sys.omega0) + " is not >> max(|Delta|, |A H1|) = "
                                   + std::to_string(scale));

    const double eps = cfg.epsilon;
    const double t_end = 1.0 / eps;
    const double period = 2.0 * std::numbers::pi / sys.omega0;
    // the lab grid refines the slow-time grid so checkpoints coincide exactly
    const auto rwa = integrate_u(sys, control, cfg, rwa_checkpoints);
    const long long coarse = rwa.n_steps;
    const long long needed = static_cast<long long>(std::ceil(t_end / period * opt.samples_per_period));
    const long long refine = std::max(1LL, (needed + coarse - 1) / coarse);
    const long long steps = refine * coarse;
    const double h = t_end / static_cast<double>(steps);

    std::vector<long long> marks;
    for (double s : rwa.grid)
        marks.push_back(std::llround(s * static_cast<double>(coarse)) * refine);

    Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
        h0(k, k) = k * (sys.omega0 + sys.deltas[k]);
    const Eigen::MatrixXd h1 = build_h1(sys);

    LabFrameReport rep;
    rep.omega0 = sys.omega0;
    rep.lab_steps = steps;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    psi[opt.initial_level] = 1.0;

    const double c = std::sqrt(3.0) / 6.0;
    std::size_t next = 0;
    for (long long i = 0; i <= steps; ++i) {
        if (next < marks.size() && marks[next] == i) {
            const double t = static_cast<double>(i) * h;
            const double s = rwa.grid[next];
            // rotating frame: phase exp(i k (omega0 t + theta/eps)) on level k
            Eigen::VectorXcd xi(n);
            for (int k = 0; k < n; ++k)
                xi[k] = std::polar(1.0, k * (sys.omega0 * t + control.theta(s) / eps)) * psi[k];
            rep.checkpoints.push_back(s);
            std::vector<double> pop(n);
            for (int k = 0; k < n; ++k)
                pop[k] = std::norm(xi[k]);
            rep.lab_populations.push_back(pop);
            ++next;
        }
        if (i == steps)
            break;
        const double t = static_cast<double>(i) * h;
        const double u1 = lab_drive(control, sys.omega0, eps, t + (0.5 - c) * h);
        const double u2 = lab_drive(control, sys.omega0, eps, t + (0.5 + c) * h);
        const Eigen::MatrixXd ha = h0 + u1 * h1;
        const Eigen::MatrixXd hb = h0 + u2 * h1;
        const Eigen::MatrixXd comm = hb * ha - ha * hb;
        const Eigen::MatrixXcd k = (0.5 * (ha + hb)).cast<cplx>() - cplx(0.0, std::sqrt(3.0) / 12.0 * h) * comm.cast<cplx>();
        psi = expm_i_hermitian(k, h) * psi;
    }

    for (std::size_t j = 0; j < rep.checkpoints.size(); ++j) {
        std::vector<double> pop(n);
        for (int k = 0; k < n; ++k) {
            pop[k] = std::norm(rwa.unitaries[j](k, opt.initial_level));
            rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(pop[k] - rep.lab_populations[j][k]));
        }
        rep.rwa_populations.push_back(pop);
    }
    for (int k = 0; k < n; ++k)
        rep.final_discrepancy
            = std::max(rep.final_discrepancy, std::abs(rep.rwa_populations.back()[k] - rep.lab_populations.back()[k]));
    return rep;
}

} // namespace adiapass
