#pragma once

#include <Eigen/Dense>

#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace adiapass {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// N-level ladder. deltas[0] is stored but never enters a Hamiltonian
/// (it is always multiplied by k = 0).
struct LadderSystem {
    int n_levels = 2;
    std::vector<double> deltas;
    std::vector<double> mus;
    double omega0 = 200.0;

    LadderSystem() = default;
    LadderSystem(std::vector<double> d, std::vector<double> m, double w0 = 200.0)
        : n_levels(static_cast<int>(d.size())), deltas(std::move(d)), mus(std::move(m)), omega0(w0)
    {
        validate();
    }

    void validate() const
    {
        if (n_levels < 2)
            throw DomainError("ladder needs at least 2 levels");
        if (static_cast<int>(deltas.size()) != n_levels)
            throw DomainError("deltas must have n_levels entries");
        if (static_cast<int>(mus.size()) != n_levels - 1)
            throw DomainError("mus must have n_levels-1 entries");
        for (double m : mus)
            if (!(m > 0.0))
                throw DomainError("dipole couplings must be strictly positive");
        if (!(omega0 > 0.0))
            throw DomainError("omega0 must be positive");
    }

    /// lambda^R_k(v) = k (Delta_k - v)
    double rotating_level(int k, double v) const { return k * (deltas[k] - v); }

    double max_abs_delta() const
    {
        double m = 0.0;
        for (int k = 1; k < n_levels; ++k)
            m = std::max(m, std::abs(deltas[k]));
        return m;
    }
};

/// Ranges for random ensembles. With fixed_deltas set, only mu varies.
struct EnsembleBounds {
    int n_levels = 4;
    double mu_min = 1.0;
    double mu_max = 5.0;
    double delta_bound = 0.0;
    std::optional<std::vector<double>> fixed_deltas;
    double omega0 = 200.0;

    void validate() const
    {
        if (n_levels < 2)
            throw DomainError("ensemble needs at least 2 levels");
        if (!(mu_min > 0.0) || !(mu_min < mu_max))
            throw DomainError("need 0 < mu_min < mu_max");
        if (delta_bound < 0.0)
            throw DomainError("delta_bound must be non-negative");
        if (fixed_deltas && static_cast<int>(fixed_deltas->size()) != n_levels)
            throw DomainError("fixed_deltas must have n_levels entries");
    }

    /// Deltas used for synthesis: the fixed set, or zeros for a centred box.
    std::vector<double> nominal_deltas() const
    {
        if (fixed_deltas)
            return *fixed_deltas;
        return std::vector<double>(n_levels, 0.0);
    }

    LadderSystem nominal_system() const
    {
        return LadderSystem(nominal_deltas(), std::vector<double>(n_levels - 1, 0.5 * (mu_min + mu_max)), omega0);
    }
};

/// Anything with omega(s) and amplitude(s) can drive the ladder.
template <class C>
concept Control = requires(const C& c, double s) {
    { c.omega(s) } -> std::convertible_to<double>;
    { c.amplitude(s) } -> std::convertible_to<double>;
};

inline RealMatrix build_h1(const LadderSystem& sys)
{
    const int n = sys.n_levels;
    RealMatrix h = RealMatrix::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
        h(j, j + 1) = sys.mus[j];
        h(j + 1, j) = sys.mus[j];
    }
    return h;
}

inline RealMatrix build_h_r(const LadderSystem& sys, double v)
{
    const int n = sys.n_levels;
    RealMatrix h = RealMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        h(k, k) = sys.rotating_level(k, v);
    return h;
}

/// H_R(omega, A) assembled directly, no range check on s.
inline RealMatrix assemble_h(const LadderSystem& sys, double omega, double amp)
{
    const int n = sys.n_levels;
    RealMatrix h = RealMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        h(k, k) = sys.rotating_level(k, omega);
    for (int j = 0; j + 1 < n; ++j) {
        h(j, j + 1) = amp * sys.mus[j];
        h(j + 1, j) = amp * sys.mus[j];
    }
    return h;
}

template <Control C>
RealMatrix build_h(const LadderSystem& sys, const C& control, double s)
{
    if (!(s >= 0.0 && s <= 1.0))
        throw DomainError("build_h: s must lie in [0,1], got " + std::to_string(s));
    return assemble_h(sys, control.omega(s), control.amplitude(s));
}

} // namespace adiapass
