#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "control.hpp"
#include "crossings.hpp"
#include "error.hpp"
#include "ladder.hpp"

namespace adiapass {

/// Two branches exchanging sorted ranks (rank, rank+1) at a designed crossing.
struct SwapEvent {
    double s = 0.0;
    int rank = 0;
    int branch_low = 0;  // branch at `rank` just before s
    int branch_high = 0; // branch at `rank + 1` just before s
    int m = 0;
    int n = 0;
};

struct TraceResult {
    std::vector<int> permutation; // branch k (starting at level k) ends on level permutation[k]
    std::vector<SwapEvent> events;
};

/// Purely combinatorial branch bookkeeping on the sub-ladder 0..levels-1.
/// Branch k starts at sorted rank k (levels ordered increasingly at s = 0); at each
/// designated crossing the two branches at the crossing ranks swap; at s = 1 the
/// order of levels is reversed, so rank r is level levels-1-r.
inline TraceResult trace_crossings(const LadderSystem& sys, const CrossingSet& cs,
                                   const std::vector<std::pair<int, int>>& zero_pairs, int levels = -1)
{
    if (levels < 0)
        levels = sys.n_levels;
    std::vector<int> rank_of(levels);
    std::iota(rank_of.begin(), rank_of.end(), 0);
    TraceResult tr;
    for (const auto& c : cs.entries) {
        if (c.n >= levels)
            continue;
        if (std::find(zero_pairs.begin(), zero_pairs.end(), std::make_pair(c.m, c.n)) == zero_pairs.end())
            continue;
        const double lm = sys.rotating_level(c.m, c.omega_cross);
        int r = 0;
        for (int j = 0; j < levels; ++j)
            if (j != c.m && j != c.n && sys.rotating_level(j, c.omega_cross) < lm)
                ++r;
        int a = -1, b = -1;
        for (int k = 0; k < levels; ++k) {
            if (rank_of[k] == r)
                a = k;
            if (rank_of[k] == r + 1)
                b = k;
        }
        rank_of[a] = r + 1;
        rank_of[b] = r;
        tr.events.push_back({c.s_cross, r, a, b, c.m, c.n});
    }
    tr.permutation.resize(levels);
    for (int k = 0; k < levels; ++k)
        tr.permutation[k] = levels - 1 - rank_of[k];
    return tr;
}

/// Pairs whose crossing time is one of the amplitude's zeros.
inline std::vector<std::pair<int, int>> designated_pairs(const CrossingSet& cs, const AmplitudeProfile& amp,
                                                         double tol = 1e-9)
{
    std::vector<std::pair<int, int>> out;
    for (const auto& c : cs.entries)
        for (double z : amp.zero_set)
            if (std::abs(z - c.s_cross) <= tol) {
                out.emplace_back(c.m, c.n);
                break;
            }
    return out;
}

/// 2001 uniform samples plus every crossing time and its +-1e-4 neighbours.
inline std::vector<double> default_grid(const CrossingSet& cs, int uniform = 2001, double halo = 1e-4)
{
    std::vector<double> g;
    g.reserve(uniform + 3 * cs.size());
    for (int i = 0; i < uniform; ++i)
        g.push_back(static_cast<double>(i) / (uniform - 1));
    for (const auto& c : cs.entries)
        for (double s : {c.s_cross - halo, c.s_cross, c.s_cross + halo})
            if (s >= 0.0 && s <= 1.0)
                g.push_back(s);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }), g.end());
    return g;
}

struct BranchDiagram {
    std::vector<double> grid;
    std::vector<std::vector<double>> branches;  // branches[k][i] = lambda_k(grid[i])
    std::vector<std::vector<double>> rotating;  // rotating[k][i] = lambda^R_k(grid[i])
    std::vector<Eigen::MatrixXd> vectors;       // column k: eigenvector of branch k, sign-continuous
    std::vector<SwapEvent> swap_events;
    std::vector<int> permutation;

    int n_levels() const { return static_cast<int>(branches.size()); }

    Eigen::MatrixXd projector(int k, std::size_t i) const
    {
        const Eigen::VectorXd v = vectors[i].col(k);
        return v * v.transpose();
    }
};

/// Analytic branches of H(s) on `grid`. Between designed crossings a branch keeps its
/// sorted rank; at a designed crossing (A = 0 there) the two branches exchange ranks.
inline BranchDiagram track_branches(const LadderSystem& sys, const ControlProfile& control,
                                    const std::vector<double>& grid, bool keep_vectors = true,
                                    double ambiguity_gap = 1e-9)
{
    const int n = sys.n_levels;
    const CrossingSet cs = crossing_set(sys, control.chirp, false);
    if (!control.chirp.increasing())
        throw DomainError("branch tracking expects an increasing chirp");
    const auto zp = designated_pairs(cs, control.amp);
    const TraceResult tr = trace_crossings(sys, cs, zp);

    BranchDiagram bd;
    bd.grid = grid;
    bd.branches.assign(n, std::vector<double>(grid.size()));
    bd.rotating.assign(n, std::vector<double>(grid.size()));
    bd.swap_events = tr.events;
    bd.permutation = tr.permutation;
    if (keep_vectors)
        bd.vectors.reserve(grid.size());

    std::vector<int> rank_of(n);
    std::iota(rank_of.begin(), rank_of.end(), 0);
    std::size_t next_event = 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = grid[i];
        while (next_event < tr.events.size() && tr.events[next_event].s < s) {
            const auto& e = tr.events[next_event++];
            std::swap(rank_of[e.branch_low], rank_of[e.branch_high]);
        }
        const double w = control.omega(s);
        const Eigen::MatrixXd h = assemble_h(sys, w, control.amplitude(s));
        es.compute(h, keep_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();

        bool at_designed = false;
        for (const auto& e : tr.events)
            if (std::abs(e.s - s) < 1e-12)
                at_designed = true;
        if (!at_designed)
            for (int r = 1; r < n; ++r)
                if (ev[r] - ev[r - 1] < ambiguity_gap)
                    throw AmbiguousTracking("eigenvalue gap " + std::to_string(ev[r] - ev[r - 1]) + " at s="
                                            + std::to_string(s) + " away from any designed crossing");

        for (int k = 0; k < n; ++k) {
            bd.branches[k][i] = ev[rank_of[k]];
            bd.rotating[k][i] = sys.rotating_level(k, w);
        }
        if (keep_vectors) {
            Eigen::MatrixXd v(n, n);
            for (int k = 0; k < n; ++k) {
                v.col(k) = es.eigenvectors().col(rank_of[k]);
                if (!bd.vectors.empty() && v.col(k).dot(bd.vectors.back().col(k)) < 0)
                    v.col(k) = -v.col(k);
            }
            bd.vectors.push_back(std::move(v));
        }
    }
    return bd;
}

/// Slopes of the two branches meeting at a designed crossing of levels m, n:
/// eigenvalues of [[-m w', A' mu_mn], [A' mu_mn, -n w']], ascending.
inline std::pair<double, double> branch_slopes_at_crossing(const LadderSystem& sys, const ControlProfile& control,
                                                           int m, int n, double s_cross)
{
    if (m > n)
        std::swap(m, n);
    const double wp = control.omega_prime(s_cross);
    const double ap = control.amplitude_prime(s_cross);
    const double mu = (n == m + 1) ? sys.mus[m] : 0.0;
    const double a = -m * wp, d = -n * wp, b = ap * mu;
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    if (rad < 0.5e-12)
        throw DomainError("branch slopes coincide at " + pair_name(m, n));
    return {mid - rad, mid + rad};
}

} // namespace adiapass
