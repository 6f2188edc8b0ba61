#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chirp.hpp"
#include "error.hpp"

namespace adiapass {

/// A(s) = s(1-s) * prod_z (s - z) * prod_a (1 + h exp(-(s-a)^2 / (2 w^2)))
/// where z runs over the interior zeros and a over the anti-crossing points,
/// times a constant gain (1 unless set).
struct AmplitudeProfile {
    std::vector<double> zero_set{0.0, 1.0};
    std::vector<double> antizero_set;
    double bump_width = 0.05;
    double bump_height = 3.0;
    double gain = 1.0;

    std::vector<double> interior_zeros() const
    {
        std::vector<double> z;
        for (double v : zero_set)
            if (v != 0.0 && v != 1.0)
                z.push_back(v);
        return z;
    }

    double operator()(double s) const
    {
        double v = gain * s * (1.0 - s);
        for (double z : zero_set)
            if (z != 0.0 && z != 1.0)
                v *= s - z;
        for (double a : antizero_set)
            v *= bump(s, a);
        return v;
    }

    double derivative(double s) const
    {
        // product rule over all factors: s, (1-s), (s-z), bumps
        std::vector<double> f, df;
        f.push_back(s);
        df.push_back(1.0);
        f.push_back(1.0 - s);
        df.push_back(-1.0);
        for (double z : zero_set)
            if (z != 0.0 && z != 1.0) {
                f.push_back(s - z);
                df.push_back(1.0);
            }
        for (double a : antizero_set) {
            f.push_back(bump(s, a));
            const double g = std::exp(-(s - a) * (s - a) / (2 * bump_width * bump_width));
            df.push_back(-bump_height * g * (s - a) / (bump_width * bump_width));
        }
        double total = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            double term = df[i];
            for (std::size_t j = 0; j < f.size(); ++j)
                if (j != i)
                    term *= f[j];
            total += term;
        }
        return gain * total;
    }

    /// max |A| over a uniform grid on [0,1]
    double peak(int samples = 4001) const
    {
        double m = 0.0;
        for (int i = 0; i < samples; ++i)
            m = std::max(m, std::abs((*this)(static_cast<double>(i) / (samples - 1))));
        return m;
    }

    /// rescales the gain so that max |A| equals `target`
    void normalize_peak(double target)
    {
        const double p = peak();
        if (!(p > 0.0))
            throw DomainError("cannot normalize an amplitude that vanishes identically");
        gain *= target / p;
    }

private:
    double bump(double s, double a) const
    {
        return 1.0 + bump_height * std::exp(-(s - a) * (s - a) / (2 * bump_width * bump_width));
    }
};

struct ControlProfile {
    ChirpProfile chirp = ChirpProfile::linear(8.0);
    AmplitudeProfile amp;

    double omega(double s) const { return chirp.omega(s); }
    double amplitude(double s) const { return amp(s); }
    double omega_prime(double s) const { return chirp.derivative(s); }
    double amplitude_prime(double s) const { return amp.derivative(s); }
    double theta(double s) const { return chirp.theta(s); }
};

} // namespace adiapass
