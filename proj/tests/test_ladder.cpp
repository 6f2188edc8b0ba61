#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace adiapass;

TEST(Ladder, RotatingDiagonalByHand)
{
    const LadderSystem sys({0.0, -1.0, 0.3, 0.0}, {1.0, 2.0, 3.0});
    const RealMatrix h = build_h_r(sys, 0.3);
    EXPECT_DOUBLE_EQ(h(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(h(1, 1), -1.3);
    EXPECT_NEAR(h(2, 2), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(h(3, 3), -0.9);
    EXPECT_EQ((h - RealMatrix(h.diagonal().asDiagonal())).norm(), 0.0);
}

TEST(Ladder, GroundLevelIsPinnedAtZero)
{
    const LadderSystem sys({0.7, 0.1, -0.2}, {1.0, 1.0});
    for (double v : {-5.0, 0.0, 2.5})
        EXPECT_EQ(build_h_r(sys, v)(0, 0), 0.0);
}

TEST(Ladder, FirstTransferCrossingIsAtOmegaEqualDelta1)
{
    const LadderSystem sys = fixtures::transfer_system();
    const RealMatrix h = build_h_r(sys, -1.0);
    EXPECT_EQ(h(0, 0), h(1, 1));
}

TEST(Ladder, CouplingMatrixIsTridiagonalWithMus)
{
    const LadderSystem sys({0, 0, 0, 0}, {1.5, 2.5, 3.5});
    const RealMatrix h1 = build_h1(sys);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double want = (j == i + 1) ? sys.mus[i] : (i == j + 1 ? sys.mus[j] : 0.0);
            EXPECT_EQ(h1(i, j), want);
        }
}

TEST(Ladder, MidSweepHamiltonianOfInversionControl)
{
    const LadderSystem sys({0.1, -0.2, 0.3, 0.05}, {1.0, 2.0, 4.0});
    const ControlProfile c{ChirpProfile::linear(8.0), AmplitudeProfile{}};
    const RealMatrix h = build_h(sys, c, 0.5);
    for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(h(k, k), k * sys.deltas[k], 1e-15);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(h(k, k + 1), 0.25 * sys.mus[k], 1e-15);
}

TEST(Ladder, EndpointsAreDiagonalAndAmplitudeZerosGiveRotatingPart)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 3.0, 4.0});
    ControlProfile c{fixtures::transfer_chirp(), AmplitudeProfile{{0.0, 0.25, 1.0}, {}}};
    for (double s : {0.0, 0.25, 1.0})
        EXPECT_EQ((build_h(sys, c, s) - build_h_r(sys, c.omega(s))).norm(), 0.0);
}

TEST(Ladder, StructureInvariants)
{
    const LadderSystem a({0.0, 0.2, -0.1}, {1.0, 2.0});
    const LadderSystem b({0.0, 0.2, -0.1}, {3.0, 0.5});
    const LadderSystem d({0.0, -0.3, 0.4}, {1.0, 2.0});
    const ControlProfile c;
    for (double s = 0.0; s <= 1.0; s += 0.05) {
        const RealMatrix ha = build_h(a, c, s), hb = build_h(b, c, s), hd = build_h(d, c, s);
        EXPECT_EQ((ha - ha.transpose()).norm(), 0.0);
        EXPECT_EQ(ha(0, 2), 0.0);
        EXPECT_EQ((ha.diagonal() - hb.diagonal()).norm(), 0.0);
        EXPECT_EQ(ha(0, 1), hd(0, 1));
        EXPECT_EQ(ha(1, 2), hd(1, 2));
    }
}

TEST(Ladder, ContinuityUnderRefinement)
{
    const LadderSystem sys = fixtures::transfer_system();
    const ControlProfile c = synthesize_transfer(sys, fixtures::transfer_chirp(), 0, 2);
    double prev = 1e9;
    for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const double d = (build_h(sys, c, 0.4 + h) - build_h(sys, c, 0.4)).cwiseAbs().maxCoeff();
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Ladder, RejectsOutOfRangeTime)
{
    const LadderSystem sys({0, 0}, {1});
    const ControlProfile c;
    EXPECT_THROW(build_h(sys, c, -0.01), DomainError);
    EXPECT_THROW(build_h(sys, c, 1.01), DomainError);
}

TEST(Ladder, ValidationRejectsBadShapes)
{
    EXPECT_THROW(LadderSystem({0.0, 0.1}, {1.0, 2.0}).validate(), DomainError);
    EXPECT_THROW(LadderSystem({0.0, 0.1}, {0.0}).validate(), DomainError);
}

TEST(Chirp, LinearProfile)
{
    const auto c = ChirpProfile::linear(8.0);
    EXPECT_DOUBLE_EQ(c.omega(0.0), -4.0);
    EXPECT_DOUBLE_EQ(c.omega(1.0), 4.0);
    EXPECT_DOUBLE_EQ(c.derivative(0.3), 8.0);
    EXPECT_DOUBLE_EQ(c.gamma(), 8.0);
    EXPECT_NEAR(c.theta(1.0), 0.0, 1e-15);
    EXPECT_NEAR(c.theta(0.5), -1.0, 1e-15); // int_0^1/2 8(s - 1/2) ds
    EXPECT_NEAR(c.inverse(-1.0), 0.375, 1e-12);
}

TEST(Chirp, TabulatedIsMonotoneAndIntegratesExactly)
{
    const auto c = ChirpProfile::tabulated({0.0, 0.3, 0.7, 1.0}, {-3.0, -0.5, 0.2, 3.0});
    EXPECT_TRUE(c.increasing());
    EXPECT_DOUBLE_EQ(c.omega(0.3), -0.5);
    double prev = c.omega(0.0);
    for (int i = 1; i <= 1000; ++i) {
        const double w = c.omega(i / 1000.0);
        EXPECT_GE(w, prev);
        prev = w;
    }
    // Simpson with fine steps reproduces the exact integral
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += wgt * c.omega(static_cast<double>(i) / n);
    }
    EXPECT_NEAR(c.theta(1.0), sum / (3.0 * n), 1e-9);
    EXPECT_NEAR(c.omega(c.inverse(0.0)), 0.0, 1e-12);
}

TEST(Amplitude, ZerosAndDerivative)
{
    AmplitudeProfile a{{0.0, 0.25, 1.0}, {0.5}, 0.05, 3.0};
    for (double z : {0.0, 0.25, 1.0})
        EXPECT_EQ(a(z), 0.0);
    for (double s : {0.1, 0.4, 0.5, 0.77}) {
        const double h = 1e-6;
        EXPECT_NEAR(a.derivative(s), (a(s + h) - a(s - h)) / (2 * h), 1e-6);
    }
    // exactly s(1-s)(s-0.25) without bumps
    a.antizero_set.clear();
    EXPECT_DOUBLE_EQ(a(0.5), 0.5 * 0.5 * 0.25);
}

TEST(Amplitude, PeakNormalization)
{
    AmplitudeProfile a{{0.0, 0.25, 1.0}, {}};
    a.normalize_peak(1.0);
    EXPECT_NEAR(a.peak(), 1.0, 1e-12);
    EXPECT_GT(a.gain, 1.0);
}
