#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "branches.hpp"
#include "chirp.hpp"
#include "control.hpp"
#include "crossings.hpp"
#include "error.hpp"
#include "ladder.hpp"

namespace adiapass {

/// sigma(k) = images[k]: population of level k is sent to level images[k].
struct Permutation {
    std::vector<int> images;

    Permutation() = default;
    explicit Permutation(std::vector<int> im) : images(std::move(im)) { validate(); }

    int size() const { return static_cast<int>(images.size()); }
    int operator()(int k) const { return images[k]; }

    void validate() const
    {
        std::vector<char> seen(images.size(), 0);
        for (int v : images) {
            if (v < 0 || v >= size() || seen[v])
                throw DomainError("permutation images are not a bijection on 0..N-1");
            seen[v] = 1;
        }
    }

    static Permutation identity(int n)
    {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return Permutation(v);
    }

    static Permutation reversal(int n)
    {
        std::vector<int> v(n);
        for (int k = 0; k < n; ++k)
            v[k] = n - 1 - k;
        return Permutation(v);
    }

    bool is_reversal() const
    {
        for (int k = 0; k < size(); ++k)
            if (images[k] != size() - 1 - k)
                return false;
        return true;
    }

    bool operator==(const Permutation&) const = default;
};

namespace detail {

inline bool ordered_at(const std::vector<double>& d, double w, bool increasing)
{
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        const double a = k * (d[k] - w), b = (k + 1) * (d[k + 1] - w);
        if (increasing ? !(a < b) : !(a > b))
            return false;
    }
    return true;
}

// worst case over the box |Delta_k| <= bound of (k+1) Delta_{k+1} - k Delta_k
inline bool ordered_box(int n, double bound, double w, bool increasing)
{
    for (int k = 0; k + 1 < n; ++k) {
        const double reach = (2 * k + 1) * bound;
        if (increasing ? !(w < -reach) : !(w > reach))
            return false;
    }
    return true;
}

} // namespace detail

/// Endpoint orderings required for full inversion: lambda^R_k(0) increasing in k and
/// lambda^R_k(1) decreasing, for every member of the ensemble. A downward sweep is
/// accepted with both orderings swapped.
inline bool validate_chirp(const EnsembleBounds& ens, const ChirpProfile& chirp)
{
    const double w0 = chirp.omega(0.0), w1 = chirp.omega(1.0);
    if (ens.fixed_deltas) {
        const auto& d = *ens.fixed_deltas;
        return (detail::ordered_at(d, w0, true) && detail::ordered_at(d, w1, false))
            || (detail::ordered_at(d, w0, false) && detail::ordered_at(d, w1, true));
    }
    const int n = ens.n_levels;
    const double b = ens.delta_bound;
    return (detail::ordered_box(n, b, w0, true) && detail::ordered_box(n, b, w1, false))
        || (detail::ordered_box(n, b, w0, false) && detail::ordered_box(n, b, w1, true));
}

/// Preconditions for crossing design on one system: (A1) distinct crossing
/// frequencies, (A2) increasing chirp, (A3) endpoint orderings.
inline void check_design_preconditions(const LadderSystem& sys, const ChirpProfile& chirp)
{
    check_a1(sys);
    if (!(chirp.gamma() > 0.0))
        throw DomainError("crossing design needs a strictly increasing chirp");
    if (!detail::ordered_at(sys.deltas, chirp.omega(0.0), true)
        || !detail::ordered_at(sys.deltas, chirp.omega(1.0), false))
        throw WindowTooNarrow("sweep window too narrow: levels are not ordered at the chirp endpoints");
}

/// Zero set making the branch that starts on level l end on level p.
inline std::vector<Crossing> zero_set_for_transfer(const LadderSystem& sys, const ChirpProfile& chirp, int l, int p)
{
    const int n = sys.n_levels;
    if (l < 0 || l >= n || p < 0 || p >= n)
        throw DomainError("transfer levels out of range");
    check_design_preconditions(sys, chirp);
    const CrossingSet cs = crossing_set(sys, chirp);

    constexpr double none = std::numeric_limits<double>::infinity();
    // earliest crossing after x of level k with a higher (up) or lower (!up) level
    auto first = [&](int k, double x, bool up) -> const Crossing* {
        for (const auto& c : cs.entries)
            if (c.s_cross > x && (up ? c.m == k : c.n == k))
                return &c;
        return nullptr;
    };
    auto time = [&](const Crossing* c) { return c ? c->s_cross : none; };

    std::vector<Crossing> out;
    const int target = n - l - p - 1;
    const bool up = target > 0; // mirrored variant swaps the roles of higher/lower partners
    const int count = std::abs(target);
    int d = 0, k = l;
    double x = 0.0;
    while (d < count) {
        for (;;) {
            const Crossing* back = first(k, x, !up);
            if (!back || !(time(back) < time(first(k, x, up))))
                break;
            k = up ? back->m : back->n;
            x = back->s_cross;
        }
        const Crossing* fwd = first(k, x, up);
        if (!fwd)
            throw SynthesisError("transfer construction ran out of crossings");
        out.push_back(*fwd);
        ++d;
        x = fwd->s_cross;
    }
    return out;
}

namespace detail {

using PairSet = std::set<std::pair<int, int>>;

inline PairSet zero_pairs(const LadderSystem& sys, const CrossingSet& cs, const std::vector<int>& sigma)
{
    const int levels = static_cast<int>(sigma.size());
    const int top = levels - 1;
    if (levels <= 1)
        return {};
    // reversal needs no crossing at all: A nonzero on ]0,1[
    bool reversal = true;
    for (int k = 0; k < levels; ++k)
        reversal = reversal && sigma[k] == top - k;
    if (reversal)
        return {};

    if (sigma[top] == top) {
        PairSet z = zero_pairs(sys, cs, std::vector<int>(sigma.begin(), sigma.end() - 1));
        for (int m = 0; m < top; ++m)
            z.insert({m, top});
        return z;
    }

    const int l = static_cast<int>(std::find(sigma.begin(), sigma.end(), top) - sigma.begin());
    const int p = sigma[top];
    std::vector<int> aux = sigma;
    aux[l] = p;
    aux[top] = top;
    PairSet z = zero_pairs(sys, cs, aux);
    const TraceResult tr = trace_crossings(sys, cs, {z.begin(), z.end()}, levels);
    for (const auto& e : tr.events) {
        const bool hit = (e.branch_low == top && e.branch_high == l) || (e.branch_low == l && e.branch_high == top);
        if (hit) {
            z.erase({e.m, e.n});
            return z;
        }
    }
    throw SynthesisError("auxiliary control has no crossing between branches " + std::to_string(top) + " and "
                         + std::to_string(l));
}

} // namespace detail

/// Designed zero set realising sigma, built by induction on the number of levels.
inline std::vector<Crossing> zero_set_for_permutation(const LadderSystem& sys, const ChirpProfile& chirp,
                                                      const Permutation& sigma)
{
    if (sigma.size() != sys.n_levels)
        throw DomainError("permutation size differs from n_levels");
    check_design_preconditions(sys, chirp);
    const CrossingSet cs = crossing_set(sys, chirp);
    const auto pairs = detail::zero_pairs(sys, cs, sigma.images);

    const TraceResult tr = trace_crossings(sys, cs, {pairs.begin(), pairs.end()});
    if (tr.permutation != sigma.images)
        throw SynthesisError("synthesis check failed: designed crossings do not induce the requested permutation");

    std::vector<Crossing> out;
    for (const auto& c : cs.entries)
        if (pairs.count({c.m, c.n}))
            out.push_back(c);
    return out;
}

/// Amplitude vanishing exactly on {0,1} and the given zeros, with bumps on every
/// other crossing of `cs`. A zero within 1e-9 of a crossing designates that crossing.
inline AmplitudeProfile build_amplitude(const std::vector<double>& zeros, const CrossingSet& cs,
                                        double bump_width = 0.05, double bump_height = 3.0)
{
    if (!(bump_width > 0.0) || bump_height < 0.0)
        throw DomainError("bump_width must be positive and bump_height non-negative");
    AmplitudeProfile a;
    a.bump_width = bump_width;
    a.bump_height = bump_height;
    a.zero_set = {0.0, 1.0};
    for (double z : zeros)
        if (z != 0.0 && z != 1.0)
            a.zero_set.push_back(z);
    std::sort(a.zero_set.begin(), a.zero_set.end());
    a.zero_set.erase(std::unique(a.zero_set.begin(), a.zero_set.end()), a.zero_set.end());

    for (const auto& c : cs.entries) {
        const bool designed
            = std::any_of(zeros.begin(), zeros.end(), [&](double z) { return std::abs(z - c.s_cross) <= 1e-9; });
        if (designed)
            continue;
        for (double z : a.zero_set)
            if (std::abs(z - c.s_cross) < 1e-6)
                throw SynthesisError("anti-crossing " + pair_name(c.m, c.n) + " lies within 1e-6 of a zero of A");
        a.antizero_set.push_back(c.s_cross);
    }
    return a;
}

inline std::vector<double> crossing_times(const std::vector<Crossing>& cs)
{
    std::vector<double> t;
    for (const auto& c : cs)
        t.push_back(c.s_cross);
    return t;
}

inline ControlProfile synthesize_permutation(const LadderSystem& sys, const ChirpProfile& chirp,
                                             const Permutation& sigma, double bump_width = 0.05,
                                             double bump_height = 3.0)
{
    const auto zs = zero_set_for_permutation(sys, chirp, sigma);
    return {chirp, build_amplitude(crossing_times(zs), crossing_set(sys, chirp), bump_width, bump_height)};
}

inline ControlProfile synthesize_transfer(const LadderSystem& sys, const ChirpProfile& chirp, int l, int p,
                                          double bump_width = 0.05, double bump_height = 3.0)
{
    const auto zs = zero_set_for_transfer(sys, chirp, l, p);
    return {chirp, build_amplitude(crossing_times(zs), crossing_set(sys, chirp), bump_width, bump_height)};
}

} // namespace adiapass
