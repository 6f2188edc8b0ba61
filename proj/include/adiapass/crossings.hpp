#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chirp.hpp"
#include "error.hpp"
#include "ladder.hpp"

namespace adiapass {

/// Degeneracy of H_R(omega(s)) between levels m < n.
struct Crossing {
    int m = 0;
    int n = 1;
    double s_cross = 0.0;
    double omega_cross = 0.0;

    bool same_pair(const Crossing& o) const { return m == o.m && n == o.n; }
};

inline std::string pair_name(int m, int n)
{
    return "s(" + std::to_string(m) + "," + std::to_string(n) + ")";
}

struct CrossingSet {
    std::vector<Crossing> entries; // sorted by s_cross

    std::size_t size() const { return entries.size(); }

    std::optional<Crossing> find(int m, int n) const
    {
        if (m > n)
            std::swap(m, n);
        for (const auto& c : entries)
            if (c.m == m && c.n == n)
                return c;
        return std::nullopt;
    }

    const Crossing& at(int m, int n) const
    {
        if (m > n)
            std::swap(m, n);
        for (const auto& c : entries)
            if (c.m == m && c.n == n)
                return c;
        throw WindowTooNarrow("no crossing " + pair_name(m, n) + " inside the sweep window");
    }

    /// crossings of the ground level, m = 0
    std::vector<double> ground_times() const
    {
        std::vector<double> out;
        for (const auto& c : entries)
            if (c.m == 0)
                out.push_back(c.s_cross);
        return out;
    }

    std::vector<double> times() const
    {
        std::vector<double> out;
        for (const auto& c : entries)
            out.push_back(c.s_cross);
        return out;
    }
};

inline double crossing_frequency(const LadderSystem& sys, int m, int n)
{
    return (n * sys.deltas[n] - m * sys.deltas[m]) / static_cast<double>(n - m);
}

/// Throws A1Violation if two distinct pairs cross at the same chirp frequency.
inline void check_a1(const LadderSystem& sys, double tol = 1e-10)
{
    struct P {
        int m, n;
        double w;
    };
    std::vector<P> ps;
    for (int m = 0; m < sys.n_levels; ++m)
        for (int n = m + 1; n < sys.n_levels; ++n)
            ps.push_back({m, n, crossing_frequency(sys, m, n)});
    std::sort(ps.begin(), ps.end(), [](const P& a, const P& b) { return a.w < b.w; });
    for (std::size_t i = 1; i < ps.size(); ++i)
        if (std::abs(ps[i].w - ps[i - 1].w) <= tol)
            throw A1Violation("(A1) violated: crossings " + pair_name(ps[i - 1].m, ps[i - 1].n) + " and "
                              + pair_name(ps[i].m, ps[i].n) + " coincide");
}

inline bool satisfies_a1(const LadderSystem& sys, double tol = 1e-10)
{
    try {
        check_a1(sys, tol);
        return true;
    } catch (const A1Violation&) {
        return false;
    }
}

/// Crossing of levels m and n, or nullopt when it falls outside [omega(0), omega(1)].
inline std::optional<Crossing> crossing_time(const LadderSystem& sys, const ChirpProfile& chirp, int m, int n)
{
    if (m > n)
        std::swap(m, n);
    if (m < 0 || n >= sys.n_levels || m == n)
        throw DomainError("crossing_time: need 0 <= m < n < N");
    const double w = crossing_frequency(sys, m, n);
    const double lo = std::min(chirp.omega(0.0), chirp.omega(1.0));
    const double hi = std::max(chirp.omega(0.0), chirp.omega(1.0));
    if (w < lo || w > hi)
        return std::nullopt;
    return Crossing{m, n, chirp.inverse(w), w};
}

inline CrossingSet crossing_set(const LadderSystem& sys, const ChirpProfile& chirp, bool require_full = true)
{
    check_a1(sys);
    CrossingSet cs;
    for (int m = 0; m < sys.n_levels; ++m)
        for (int n = m + 1; n < sys.n_levels; ++n)
            if (auto c = crossing_time(sys, chirp, m, n))
                cs.entries.push_back(*c);
    std::sort(cs.entries.begin(), cs.entries.end(),
              [](const Crossing& a, const Crossing& b) { return a.s_cross < b.s_cross; });
    const std::size_t full = static_cast<std::size_t>(sys.n_levels * (sys.n_levels - 1) / 2);
    if (require_full && cs.size() < full)
        throw WindowTooNarrow("sweep window too narrow: found " + std::to_string(cs.size()) + " of "
                              + std::to_string(full) + " crossings");
    return cs;
}

} // namespace adiapass
