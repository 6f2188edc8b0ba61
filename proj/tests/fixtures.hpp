#pragma once

#include <adiapass/adiapass.hpp>

#include <random>
#include <vector>

namespace fixtures {

using namespace adiapass;

// Delta = (., -1, 0.3, 0) swept by omega(s) = 4(s - 1/2)
inline LadderSystem transfer_system(std::vector<double> mus = {1.0, 1.0, 1.0})
{
    return LadderSystem({0.0, -1.0, 0.3, 0.0}, std::move(mus));
}

inline ChirpProfile transfer_chirp() { return ChirpProfile::linear(4.0); }

inline EnsembleBounds transfer_bounds()
{
    EnsembleBounds b;
    b.n_levels = 4;
    b.mu_min = 1.0;
    b.mu_max = 5.0;
    b.fixed_deltas = std::vector<double>{0.0, -1.0, 0.3, 0.0};
    return b;
}

inline EnsembleBounds inversion_bounds()
{
    EnsembleBounds b;
    b.n_levels = 4;
    b.mu_min = 1.0;
    b.mu_max = 5.0;
    b.delta_bound = 0.4;
    return b;
}

// uniform deltas in [-bound, bound] until (A1) holds
inline LadderSystem random_a1_system(int n, double bound, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> d(-bound, bound), m(1.0, 5.0);
    for (;;) {
        std::vector<double> deltas(n), mus(n - 1);
        for (auto& x : deltas)
            x = d(rng);
        for (auto& x : mus)
            x = m(rng);
        LadderSystem sys(deltas, mus);
        if (satisfies_a1(sys, 0.02))
            return sys;
    }
}

inline std::vector<Permutation> all_permutations(int n)
{
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = i;
    std::vector<Permutation> out;
    do
        out.emplace_back(v);
    while (std::next_permutation(v.begin(), v.end()));
    return out;
}

} // namespace fixtures
