#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

#include "fixtures.hpp"

using namespace adiapass;

namespace {

ControlProfile silent(const ChirpProfile& chirp)
{
    ControlProfile c{chirp, AmplitudeProfile{}};
    c.amp.gain = 0.0;
    return c;
}

} // namespace

TEST(Linalg, ExponentialOfDiagonal)
{
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -2.0;
    const auto u = expm_i_symmetric(h, 0.5);
    EXPECT_NEAR(std::abs(u(0, 0) - std::polar(1.0, -0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, 1.0)), 0.0, 1e-15);
    EXPECT_LT(unitarity_defect(u), 1e-14);
}

TEST(Linalg, PauliXRotation)
{
    Eigen::MatrixXd x(2, 2);
    x << 0, 1, 1, 0;
    const auto u = expm_i_symmetric(x, std::numbers::pi / 2);
    EXPECT_NEAR(std::norm(u(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(u(0, 0)), 0.0, 1e-14);
}

TEST(Propagator, UndrivenLadderAccumulatesDynamicalPhases)
{
    // A = 0: U(1)_kk = exp(-i/eps int_0^1 k (Delta_k - omega) ds) = exp(-i k Delta_k / eps)
    const LadderSystem sys({0.0, -1.0, 0.3, 0.0}, {1.0, 1.0, 1.0});
    SimulationConfig cfg;
    cfg.epsilon = 1e-2;
    cfg.n_steps = 2000;
    const auto tr = integrate_u(sys, silent(ChirpProfile::linear(4.0)), cfg);
    const auto& u = tr.final();
    for (int k = 0; k < 4; ++k) {
        const std::complex<double> want = std::polar(1.0, -k * sys.deltas[k] / cfg.epsilon);
        EXPECT_NEAR(std::abs(u(k, k) - want), 0.0, 1e-9);
    }
    EXPECT_NEAR((populations(u) - Eigen::MatrixXd::Identity(4, 4)).norm(), 0.0, 1e-12);
}

TEST(Propagator, CheckpointsIncludeEnd)
{
    const LadderSystem sys({0.0, 0.1}, {1.0});
    SimulationConfig cfg;
    cfg.epsilon = 0.1;
    cfg.n_steps = 1000;
    const auto tr = integrate_u(sys, ControlProfile{}, cfg, {0.0, 0.25, 0.5});
    ASSERT_EQ(tr.grid.size(), 4u);
    EXPECT_EQ(tr.grid.back(), 1.0);
    EXPECT_NEAR((tr.unitaries[0] - Eigen::MatrixXcd::Identity(2, 2)).norm(), 0.0, 1e-15);
}

TEST(Propagator, TwoLevelInversionApproachesOne)
{
    const LadderSystem sys({0.0, 0.2}, {1.0});
    const ControlProfile c{ChirpProfile::linear(8.0), AmplitudeProfile{}};
    double prev = 2.0;
    for (double eps : {1e-1, 3e-2, 1e-2, 3e-3}) {
        SimulationConfig cfg;
        cfg.epsilon = eps;
        const double err = transfer_fidelity(integrate_u(sys, c, cfg).final(), 0, 1);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(Propagator, SchemesAgreeAndHalvingIsReported)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 1.0, 3.0});
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    SimulationConfig cfg;
    cfg.epsilon = 1e-2;
    cfg.check_convergence = true;
    const auto mid = integrate_u(sys, c, cfg);
    ASSERT_TRUE(mid.halving_difference.has_value());
    EXPECT_LE(*mid.halving_difference, 1e-6);
    EXPECT_LE(mid.unitarity_defect, 1e-10);
    cfg.scheme = Scheme::magnus4;
    const auto m4 = integrate_u(sys, c, cfg);
    EXPECT_LE(max_abs_diff(mid.final(), m4.final()), 1e-6);
}

TEST(Propagator, CoarseGridFailsHalvingCheck)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 1.0, 3.0});
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    SimulationConfig cfg;
    cfg.epsilon = 1e-2;
    cfg.n_steps = 200;
    cfg.check_convergence = true;
    EXPECT_THROW(integrate_u(sys, c, cfg), ConvergenceError);
}

TEST(Propagator, AutoStepsRefineUntilHalvingAgrees)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 1.0, 3.0});
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    SimulationConfig cfg;
    cfg.epsilon = 1e-2;
    cfg.check_convergence = true;
    cfg.convergence_tolerance = 1e-8;
    const auto tr = integrate_u(sys, c, cfg, {0.5});
    EXPECT_GT(tr.n_steps, cfg.steps());
    ASSERT_TRUE(tr.halving_difference.has_value());
    EXPECT_LE(*tr.halving_difference, 1e-8);
    EXPECT_EQ(tr.unitaries.size(), tr.grid.size());
    EXPECT_NE(std::find(tr.grid.begin(), tr.grid.end(), 0.5), tr.grid.end());
}

TEST(Propagator, AutoStepsRespectLowerBound)
{
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4})
        EXPECT_GE(SimulationConfig::auto_steps(eps), std::max(2000, static_cast<int>(std::ceil(20.0 / eps))));
    SimulationConfig bad;
    bad.epsilon = 0.0;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Propagator, FidelityIdentities)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 1.0, 3.0});
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    SimulationConfig cfg;
    cfg.epsilon = 3e-2;
    const auto u = integrate_u(sys, c, cfg).final();
    for (int k = 0; k < 4; ++k)
        for (int t = 0; t < 4; ++t)
            EXPECT_NEAR(transfer_fidelity(u, k, t), transfer_fidelity_closed_form(u, k, t), 1e-10);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(4, 4);
    EXPECT_EQ(transfer_fidelity(id, 2, 2), 0.0);
    EXPECT_NEAR(transfer_fidelity(id, 2, 1), std::sqrt(2.0), 1e-15);
    EXPECT_EQ(permutation_deviation(id, {0, 1, 2, 3}), 0.0);
    EXPECT_EQ(permutation_deviation(id, {1, 0, 2, 3}), 1.0);
}

TEST(Propagator, Deterministic)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 1.0, 3.0});
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    SimulationConfig cfg;
    cfg.epsilon = 3e-2;
    EXPECT_EQ((integrate_u(sys, c, cfg).final() - integrate_u(sys, c, cfg).final()).norm(), 0.0);
}

TEST(Adiabatic, IntertwinesBranchProjector)
{
    const LadderSystem sys({0.0, 0.1, -0.2, 0.3}, {1.0, 2.0, 3.0});
    const ControlProfile c{ChirpProfile::linear(8.0), AmplitudeProfile{}};
    SimulationConfig cfg;
    cfg.epsilon = 1e-2;
    std::vector<double> cps;
    for (int i = 0; i <= 10; ++i)
        cps.push_back(i / 10.0);
    const auto res = adiabatic_propagator(sys, c, cfg, 0, cps);
    EXPECT_LE(res.intertwining, 1e-4);
    EXPECT_LE(res.trajectory.unitarity_defect, 1e-10);
    // the branch from the ground state ends on the top level
    EXPECT_NEAR(std::norm(res.trajectory.final()(3, 0)), 1.0, 1e-4);
}

TEST(Adiabatic, ProjectorDerivativeMatchesFiniteDifference)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 1.0, 3.0});
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    for (int k = 0; k < 4; ++k) {
        const BranchProjector proj(sys, c, k);
        for (double s : {0.1, 0.4, 0.7}) {
            const double h = 1e-5;
            const Eigen::MatrixXd fd = (proj(s + h) - proj(s - h)) / (2 * h);
            EXPECT_LT((proj.with_derivative(s).second - fd).norm(), 1e-5 * std::max(1.0, fd.norm()));
        }
    }
}

TEST(Adiabatic, CloseToExactPropagatorInGapCase)
{
    const LadderSystem sys({0.0, 0.1, -0.2, 0.3}, {1.0, 2.0, 3.0});
    const ControlProfile c{ChirpProfile::linear(8.0), AmplitudeProfile{}};
    Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(4, 4);
    p0(0, 0) = 1.0;
    double prev = 2.0;
    for (double eps : {1e-2, 3e-3, 1e-3}) {
        SimulationConfig cfg;
        cfg.epsilon = eps;
        const auto ua = adiabatic_propagator(sys, c, cfg, 0).trajectory.final();
        const auto u = integrate_u(sys, c, cfg).final();
        const double d = (u * p0 * u.adjoint() - ua * p0 * ua.adjoint()).norm();
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(LabFrame, ScaleSeparationIsEnforced)
{
    LadderSystem sys({0.0, 0.4}, {1.0});
    sys.omega0 = 1.0;
    SimulationConfig cfg;
    cfg.epsilon = 1e-1;
    EXPECT_THROW(lab_frame_validate(sys, ControlProfile{}, cfg, {}), ScaleSeparationError);
}

TEST(LabFrame, AgreesWithRotatingFrame)
{
    LadderSystem sys({0.0, 0.4}, {1.0});
    sys.omega0 = 200.0;
    SimulationConfig cfg;
    cfg.epsilon = 1e-1;
    const auto rep = lab_frame_validate(sys, ControlProfile{}, cfg, {0.0, 0.5});
    ASSERT_EQ(rep.checkpoints.size(), 3u);
    EXPECT_LT(rep.final_discrepancy, 0.01);
    EXPECT_NEAR(rep.lab_populations.back()[0] + rep.lab_populations.back()[1], 1.0, 1e-9);
}
