#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"

namespace adiapass {

/// Chirp omega(s) on [0,1]: either linear, omega = alpha (s - 1/2) + offset,
/// or a monotone cubic (Fritsch-Carlson) through tabulated samples.
class ChirpProfile {
public:
    enum class Kind { linear, tabulated };

    static ChirpProfile linear(double alpha, double offset = 0.0)
    {
        ChirpProfile c;
        c.kind_ = Kind::linear;
        c.alpha_ = alpha;
        c.offset_ = offset;
        return c;
    }

    static ChirpProfile tabulated(std::vector<double> s, std::vector<double> omega)
    {
        if (s.size() < 2 || s.size() != omega.size())
            throw DomainError("tabulated chirp needs >= 2 matching (s, omega) samples");
        if (std::abs(s.front()) > 1e-12 || std::abs(s.back() - 1.0) > 1e-12)
            throw DomainError("tabulated chirp must span s = 0 .. 1");
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i] > s[i - 1]))
                throw DomainError("tabulated chirp: s samples must be strictly increasing");
        const bool up = omega.back() > omega.front();
        for (std::size_t i = 1; i < s.size(); ++i)
            if (up ? !(omega[i] > omega[i - 1]) : !(omega[i] < omega[i - 1]))
                throw DomainError("tabulated chirp must be strictly monotone");

        ChirpProfile c;
        c.kind_ = Kind::tabulated;
        c.ts_ = std::move(s);
        c.ws_ = std::move(omega);
        c.build_slopes();
        return c;
    }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double offset() const { return offset_; }
    const std::vector<double>& table_s() const { return ts_; }
    const std::vector<double>& table_omega() const { return ws_; }

    double omega(double s) const
    {
        if (kind_ == Kind::linear)
            return alpha_ * (s - 0.5) + offset_;
        auto [i, t, h] = locate(s);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * ws_[i] + (t3 - 2 * t2 + t) * h * ms_[i]
            + (-2 * t3 + 3 * t2) * ws_[i + 1] + (t3 - t2) * h * ms_[i + 1];
    }

    double derivative(double s) const
    {
        if (kind_ == Kind::linear)
            return alpha_;
        auto [i, t, h] = locate(s);
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * ws_[i] + (-6 * t2 + 6 * t) * ws_[i + 1]) / h
            + (3 * t2 - 4 * t + 1) * ms_[i] + (3 * t2 - 2 * t) * ms_[i + 1];
    }

    /// theta(s) = integral of omega from 0 to s.
    double theta(double s) const
    {
        if (kind_ == Kind::linear)
            return alpha_ * (0.5 * s * s - 0.5 * s) + offset_ * s;
        double acc = 0.0;
        std::size_t i = 0;
        for (; i + 1 < ts_.size() && ts_[i + 1] <= s; ++i) {
            const double h = ts_[i + 1] - ts_[i];
            acc += h * (ws_[i] + ws_[i + 1]) / 2 + h * h * (ms_[i] - ms_[i + 1]) / 12;
        }
        if (i + 1 < ts_.size() && s > ts_[i]) {
            // Simpson is exact on a cubic piece
            const double a = ts_[i];
            acc += (s - a) / 6 * (omega(a) + 4 * omega(0.5 * (a + s)) + omega(s));
        }
        return acc;
    }

    /// min over [0,1] of omega'(s) (negative for downward sweeps)
    double gamma() const
    {
        if (kind_ == Kind::linear)
            return alpha_;
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < ts_.size(); ++i) {
            const double a = ts_[i], b = ts_[i + 1];
            g = std::min({g, derivative(a), derivative(b)});
            // derivative is quadratic in t; check the vertex
            const double h = b - a;
            const double d0 = ms_[i] * h, d1 = ms_[i + 1] * h, dy = ws_[i + 1] - ws_[i];
            const double qa = 3 * (d0 + d1) - 6 * dy;
            const double qb = 6 * dy - 4 * d0 - 2 * d1;
            if (std::abs(qa) > 0) {
                const double tv = -qb / (2 * qa);
                if (tv > 0 && tv < 1)
                    g = std::min(g, derivative(a + tv * h));
            }
        }
        return g;
    }

    bool increasing() const { return omega(1.0) > omega(0.0); }

    /// s with omega(s) = v by bisection; requires v within [omega(0), omega(1)].
    double inverse(double v, double tol = 1e-13) const
    {
        double lo = 0.0, hi = 1.0;
        const bool up = increasing();
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double w = omega(mid);
            if ((w < v) == up)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    struct Loc {
        std::size_t i;
        double t;
        double h;
    };

    Loc locate(double s) const
    {
        auto it = std::upper_bound(ts_.begin(), ts_.end(), s);
        std::size_t i = it == ts_.begin() ? 0 : static_cast<std::size_t>(it - ts_.begin()) - 1;
        i = std::min(i, ts_.size() - 2);
        const double h = ts_[i + 1] - ts_[i];
        return {i, (s - ts_[i]) / h, h};
    }

    void build_slopes()
    {
        const std::size_t n = ts_.size();
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (ws_[i + 1] - ws_[i]) / (ts_[i + 1] - ts_[i]);
        ms_.assign(n, 0.0);
        ms_[0] = d[0];
        ms_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            ms_[i] = 0.5 * (d[i - 1] + d[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = ms_[i] / d[i], b = ms_[i + 1] / d[i];
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double tau = 3.0 / std::sqrt(r);
                ms_[i] = tau * a * d[i];
                ms_[i + 1] = tau * b * d[i];
            }
        }
    }

    Kind kind_ = Kind::linear;
    double alpha_ = 0.0;
    double offset_ = 0.0;
    std::vector<double> ts_, ws_, ms_;
};

} // namespace adiapass
