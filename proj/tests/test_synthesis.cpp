#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"

using namespace adiapass;

TEST(Permutation, Basics)
{
    EXPECT_TRUE(Permutation::reversal(4).is_reversal());
    EXPECT_FALSE(Permutation::identity(4).is_reversal());
    EXPECT_THROW(Permutation({0, 0, 1}), DomainError);
    EXPECT_THROW(Permutation({0, 3}), DomainError);
}

TEST(Synthesis, TransferZeroToTwoUsesFirstGroundCrossing)
{
    const auto zs = zero_set_for_transfer(fixtures::transfer_system(), fixtures::transfer_chirp(), 0, 2);
    ASSERT_EQ(zs.size(), 1u);
    EXPECT_EQ(zs[0].m, 0);
    EXPECT_EQ(zs[0].n, 1);
    EXPECT_NEAR(zs[0].s_cross, 0.25, 1e-10);
}

TEST(Synthesis, ReversalNeedsNoZeros)
{
    const auto zs
        = zero_set_for_permutation(fixtures::transfer_system(), fixtures::transfer_chirp(), Permutation::reversal(4));
    EXPECT_TRUE(zs.empty());
}

TEST(Synthesis, PermutationExample)
{
    const auto zs = zero_set_for_permutation(fixtures::transfer_system(), fixtures::transfer_chirp(),
                                             Permutation({2, 0, 3, 1}));
    std::set<std::pair<int, int>> pairs;
    for (const auto& c : zs)
        pairs.insert({c.m, c.n});
    EXPECT_EQ(pairs, (std::set<std::pair<int, int>>{{0, 3}, {1, 3}, {0, 2}}));
}

TEST(Synthesis, TransferCardinalityAndTarget)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const LadderSystem sys = fixtures::random_a1_system(5, 0.3, rng);
        const auto chirp = ChirpProfile::linear(12.0);
        const auto cs = crossing_set(sys, chirp);
        for (int l = 0; l < 5; ++l)
            for (int p = 0; p < 5; ++p) {
                const auto zs = zero_set_for_transfer(sys, chirp, l, p);
                EXPECT_EQ(static_cast<int>(zs.size()), std::abs(5 - l - p - 1)) << l << "->" << p;
                std::vector<std::pair<int, int>> zp;
                for (const auto& c : zs)
                    zp.emplace_back(c.m, c.n);
                EXPECT_EQ(trace_crossings(sys, cs, zp).permutation[l], p) << l << "->" << p;
            }
    }
}

TEST(Synthesis, EveryPermutationUpToFourLevelsCombinatorially)
{
    std::mt19937_64 rng(3);
    for (int n = 2; n <= 4; ++n)
        for (int trial = 0; trial < 3; ++trial) {
            const LadderSystem sys = fixtures::random_a1_system(n, 0.4, rng);
            const auto chirp = ChirpProfile::linear(8.0);
            const auto cs = crossing_set(sys, chirp);
            for (const auto& sigma : fixtures::all_permutations(n)) {
                const ControlProfile c = synthesize_permutation(sys, chirp, sigma);
                EXPECT_EQ(trace_crossings(sys, cs, designated_pairs(cs, c.amp)).permutation, sigma.images);
            }
        }
}

TEST(Synthesis, EveryPermutationTrackedOnTransferSystem)
{
    const LadderSystem sys = fixtures::transfer_system({2.0, 3.0, 1.5});
    const auto chirp = fixtures::transfer_chirp();
    const auto cs = crossing_set(sys, chirp);
    for (const auto& sigma : fixtures::all_permutations(4)) {
        const ControlProfile c = synthesize_permutation(sys, chirp, sigma);
        const auto bd = track_branches(sys, c, default_grid(cs), false);
        EXPECT_EQ(bd.permutation, sigma.images);
        EXPECT_EQ(bd.swap_events.size(), c.amp.interior_zeros().size());
    }
}

TEST(Synthesis, TransferAgreesWithExtendingPermutation)
{
    const LadderSystem sys = fixtures::transfer_system();
    const auto chirp = fixtures::transfer_chirp();
    const auto cs = crossing_set(sys, chirp);
    for (int l = 0; l < 4; ++l)
        for (int p = 0; p < 4; ++p) {
            const ControlProfile t = synthesize_transfer(sys, chirp, l, p);
            const int via_transfer = trace_crossings(sys, cs, designated_pairs(cs, t.amp)).permutation[l];
            for (const auto& sigma : fixtures::all_permutations(4))
                if (sigma(l) == p) {
                    const ControlProfile c = synthesize_permutation(sys, chirp, sigma);
                    EXPECT_EQ(trace_crossings(sys, cs, designated_pairs(cs, c.amp)).permutation[l], via_transfer);
                }
        }
}

TEST(Synthesis, AmbiguousTrackingIsSignalled)
{
    // four zeros packed into [0.44, 0.55] leave |A| ~ 1e-6 at the anti-crossing at s = 0.524
    const LadderSystem sys({0.318717, -0.0536962, 0.376683, 0.110537}, {1.0, 1.0, 1.0});
    const auto chirp = ChirpProfile::linear(8.0);
    const ControlProfile c = synthesize_permutation(sys, chirp, Permutation({0, 3, 1, 2}));
    EXPECT_THROW(track_branches(sys, c, default_grid(crossing_set(sys, chirp))), AmbiguousTracking);
}

TEST(Synthesis, AmplitudeVanishesOnDesignedCrossingsOnly)
{
    const LadderSystem sys = fixtures::transfer_system();
    const ControlProfile c = synthesize_permutation(sys, fixtures::transfer_chirp(), Permutation({2, 0, 3, 1}));
    const auto cs = crossing_set(sys, c.chirp);
    for (const auto& x : cs.entries) {
        const bool designed = (x.m == 0 && x.n == 3) || (x.m == 1 && x.n == 3) || (x.m == 0 && x.n == 2);
        if (designed)
            EXPECT_EQ(c.amplitude(x.s_cross), 0.0) << pair_name(x.m, x.n);
        else
            EXPECT_GT(std::abs(c.amplitude(x.s_cross)), 1e-4) << pair_name(x.m, x.n);
    }
    EXPECT_EQ(c.amplitude(0.0), 0.0);
    EXPECT_EQ(c.amplitude(1.0), 0.0);
}

TEST(Synthesis, PreconditionFailures)
{
    const auto chirp = fixtures::transfer_chirp();
    EXPECT_THROW(zero_set_for_transfer(fixtures::transfer_system(), chirp, 0, 4), DomainError);
    EXPECT_THROW(zero_set_for_permutation(fixtures::transfer_system(), chirp, Permutation::identity(3)), DomainError);
    EXPECT_THROW(zero_set_for_permutation(LadderSystem({0, 0, 0}, {1, 1}), ChirpProfile::linear(8.0),
                                          Permutation::identity(3)),
                 A1Violation);
    EXPECT_THROW(zero_set_for_transfer(fixtures::transfer_system(), ChirpProfile::linear(1.0), 0, 2), Error);
}

TEST(Synthesis, ChirpValidationForDeltaBox)
{
    EnsembleBounds b = fixtures::inversion_bounds();
    // pair (2,3) needs omega(0) < -5 * 0.4
    EXPECT_TRUE(validate_chirp(b, ChirpProfile::linear(4.1)));
    EXPECT_FALSE(validate_chirp(b, ChirpProfile::linear(3.9)));
    EXPECT_TRUE(validate_chirp(b, ChirpProfile::linear(-8.0)));
    EXPECT_TRUE(validate_chirp(fixtures::transfer_bounds(), fixtures::transfer_chirp()));
}

TEST(Synthesis, UserZeroCloseToAnticrossingIsRejected)
{
    const auto cs = crossing_set(fixtures::transfer_system(), fixtures::transfer_chirp());
    EXPECT_THROW(build_amplitude({0.5 + 5e-7}, cs), SynthesisError);
    const auto a = build_amplitude({0.25}, cs);
    EXPECT_EQ(a.antizero_set.size(), 5u);
}
