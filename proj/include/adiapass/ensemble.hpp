#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "control.hpp"
#include "error.hpp"
#include "ladder.hpp"
#include "propagator.hpp"
#include "synthesis.hpp"

namespace adiapass {

/// mu uniform in [mu_min, mu_max]; deltas uniform in [-bound, bound] unless fixed.
inline std::vector<LadderSystem> sample_ensemble(const EnsembleBounds& b, int count, std::uint64_t seed)
{
    b.validate();
    if (count < 1)
        throw DomainError("ensemble count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mu(b.mu_min, b.mu_max);
    std::uniform_real_distribution<double> delta(-b.delta_bound, b.delta_bound);
    std::vector<LadderSystem> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        std::vector<double> m(b.n_levels - 1), d(b.n_levels);
        for (auto& x : m)
            x = mu(rng);
        if (b.fixed_deltas)
            d = *b.fixed_deltas;
        else
            for (auto& x : d)
                x = b.delta_bound > 0.0 ? delta(rng) : 0.0;
        out.emplace_back(std::move(d), std::move(m), b.omega0);
    }
    return out;
}

/// What a campaign asks for: full permutation, or a single transfer l -> p.
struct Task {
    enum class Kind { permutation, transfer };
    Kind kind = Kind::permutation;
    Permutation sigma;
    int l = 0;
    int p = 0;

    static Task permutation(Permutation s) { return {Kind::permutation, std::move(s), 0, 0}; }
    static Task transfer(int l, int p) { return {Kind::transfer, {}, l, p}; }

    /// (k, target) pairs checked by the campaign
    std::vector<std::pair<int, int>> targets() const
    {
        std::vector<std::pair<int, int>> t;
        if (kind == Kind::transfer)
            t.emplace_back(l, p);
        else
            for (int k = 0; k < sigma.size(); ++k)
                t.emplace_back(k, sigma(k));
        return t;
    }
};

struct CampaignOptions {
    double bump_width = 0.05;
    double bump_height = 3.0;
    double gain = 1.0;
    double peak = 0.0; // > 0: rescale the amplitude so that max |A| = peak (overrides gain)
    int n_steps = 0;
    Scheme scheme = Scheme::midpoint;
    bool check_convergence = false;
    int threads = 0; // 0: hardware concurrency
};

struct MemberResult {
    std::vector<double> mus;
    std::vector<double> deltas;
    std::vector<double> fidelity; // per target pair, in Task::targets order
    Eigen::MatrixXd populations;  // |U(1)|^2
    double unitarity_defect = 0.0;
    std::optional<double> halving_difference;
};

struct EnsembleReport {
    std::vector<MemberResult> per_system;
    std::vector<std::pair<int, int>> targets;
    double worst_case = 0.0;
    double mean = 0.0;
    double worst_population_deviation = 0.0; // max | |U_ij|^2 - target_ij | (permutation tasks)
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    ControlProfile control;
};

inline ControlProfile scaled(ControlProfile c, const CampaignOptions& opt)
{
    c.amp.gain = opt.gain;
    if (opt.peak > 0.0)
        c.amp.normalize_peak(opt.peak);
    return c;
}

/// The control a campaign applies to every member: synthesized once from the nominal deltas.
/// Ensembles with varying deltas only admit the full reversal.
inline ControlProfile campaign_control(const EnsembleBounds& b, const Task& task, const ChirpProfile& chirp,
                                       const CampaignOptions& opt = {})
{
    b.validate();
    if (!b.fixed_deltas) {
        const bool reversal = task.kind == Task::Kind::permutation ? task.sigma.is_reversal()
                                                                   : task.p == b.n_levels - 1 - task.l;
        if (!reversal)
            throw DomainError("ensembles with varying deltas only support the full reversal; set fixed_deltas");
        if (!validate_chirp(b, chirp))
            throw WindowTooNarrow("chirp endpoints do not order the levels for every ensemble member");
        return scaled({chirp, AmplitudeProfile{{0.0, 1.0}, {}, opt.bump_width, opt.bump_height}}, opt);
    }
    const LadderSystem nominal = b.nominal_system();
    if (task.kind == Task::Kind::transfer)
        return scaled(synthesize_transfer(nominal, chirp, task.l, task.p, opt.bump_width, opt.bump_height), opt);
    return scaled(synthesize_permutation(nominal, chirp, task.sigma, opt.bump_width, opt.bump_height), opt);
}

namespace detail {

template <class F>
void parallel_for(int count, int threads, F&& f)
{
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::vector<std::future<void>> jobs;
    for (int t = 0; t < threads; ++t)
        jobs.push_back(std::async(std::launch::async, [&, t] {
            for (int i = t; i < count; i += threads)
                f(i);
        }));
    for (auto& j : jobs)
        j.get();
}

} // namespace detail

/// Applies `control` to every member and aggregates worst-case fidelities.
inline EnsembleReport run_campaign(const std::vector<LadderSystem>& members, const ControlProfile& control,
                                   const Task& task, double epsilon, const CampaignOptions& opt = {})
{
    EnsembleReport rep;
    rep.targets = task.targets();
    rep.epsilon = epsilon;
    rep.control = control;
    rep.per_system.resize(members.size());
    SimulationConfig cfg;
    cfg.epsilon = epsilon;
    cfg.n_steps = opt.n_steps;
    cfg.scheme = opt.scheme;
    cfg.check_convergence = opt.check_convergence;

    std::vector<std::exception_ptr> errors(members.size());
    detail::parallel_for(static_cast<int>(members.size()), opt.threads, [&](int i) {
        try {
            const auto tr = integrate_u(members[i], control, cfg);
            MemberResult& r = rep.per_system[i];
            r.mus = members[i].mus;
            r.deltas = members[i].deltas;
            r.populations = populations(tr.final());
            r.unitarity_defect = tr.unitarity_defect;
            r.halving_difference = tr.halving_difference;
            for (auto [k, t] : rep.targets)
                r.fidelity.push_back(transfer_fidelity(tr.final(), k, t));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw Error("ensemble member " + std::to_string(i) + ": " + e.what());
            }
        }

    double sum = 0.0;
    std::size_t cnt = 0;
    for (const auto& r : rep.per_system) {
        for (double f : r.fidelity) {
            rep.worst_case = std::max(rep.worst_case, f);
            sum += f;
            ++cnt;
        }
        if (task.kind == Task::Kind::permutation)
            for (Eigen::Index row = 0; row < r.populations.rows(); ++row)
                for (Eigen::Index col = 0; col < r.populations.cols(); ++col)
                    rep.worst_population_deviation
                        = std::max(rep.worst_population_deviation,
                                   std::abs(r.populations(row, col) - (task.sigma(int(col)) == row ? 1.0 : 0.0)));
        else
            rep.worst_population_deviation
                = std::max(rep.worst_population_deviation, 1.0 - r.populations(task.p, task.l));
    }
    rep.mean = cnt ? sum / static_cast<double>(cnt) : 0.0;
    return rep;
}

inline EnsembleReport run_permutation_campaign(const EnsembleBounds& b, const Permutation& sigma,
                                               const ChirpProfile& chirp, double epsilon, int count,
                                               std::uint64_t seed, const CampaignOptions& opt = {})
{
    const Task task = Task::permutation(sigma);
    const ControlProfile control = campaign_control(b, task, chirp, opt);
    EnsembleReport rep = run_campaign(sample_ensemble(b, count, seed), control, task, epsilon, opt);
    rep.seed = seed;
    return rep;
}

inline EnsembleReport run_transfer_campaign(const EnsembleBounds& b, int l, int p, const ChirpProfile& chirp,
                                            double epsilon, int count, std::uint64_t seed,
                                            const CampaignOptions& opt = {})
{
    const Task task = Task::transfer(l, p);
    const ControlProfile control = campaign_control(b, task, chirp, opt);
    EnsembleReport rep = run_campaign(sample_ensemble(b, count, seed), control, task, epsilon, opt);
    rep.seed = seed;
    return rep;
}

struct SweepResult {
    std::vector<double> epsilons;
    std::vector<double> worst_case;
    double slope = 0.0; // least-squares slope of log(worst) against log(eps)
    std::vector<EnsembleReport> reports;

    bool strictly_decreasing() const
    {
        for (std::size_t i = 1; i < worst_case.size(); ++i)
            if (!(worst_case[i] < worst_case[i - 1]))
                return false;
        return true;
    }

    bool non_increasing() const
    {
        for (std::size_t i = 1; i < worst_case.size(); ++i)
            if (worst_case[i] > worst_case[i - 1])
                return false;
        return true;
    }
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

/// One campaign per epsilon (descending) on a shared ensemble and a shared control.
inline SweepResult epsilon_sweep(const EnsembleBounds& b, const Task& task, const ChirpProfile& chirp,
                                 const std::vector<double>& epsilons, int count, std::uint64_t seed,
                                 const CampaignOptions& opt = {})
{
    if (epsilons.size() < 3)
        throw DomainError("epsilon sweep needs at least 3 values");
    for (std::size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1]))
            throw DomainError("epsilons must be sorted in descending order");
    const ControlProfile control = campaign_control(b, task, chirp, opt);
    const auto members = sample_ensemble(b, count, seed);
    SweepResult res;
    res.epsilons = epsilons;
    for (double e : epsilons) {
        EnsembleReport rep = run_campaign(members, control, task, e, opt);
        rep.seed = seed;
        res.worst_case.push_back(rep.worst_case);
        res.reports.push_back(std::move(rep));
    }
    res.slope = loglog_slope(res.epsilons, res.worst_case);
    return res;
}

struct PermutationStudy {
    std::vector<Permutation> sigmas;
    std::vector<EnsembleReport> reports;
    double worst_deviation = 0.0;
};

/// Every permutation of 0..N-1 in lexicographic order, each with its own synthesized control.
inline PermutationStudy all_permutations_study(const EnsembleBounds& b, const ChirpProfile& chirp, double epsilon,
                                               int count, std::uint64_t seed, const CampaignOptions& opt = {})
{
    PermutationStudy st;
    std::vector<int> v(b.n_levels);
    std::iota(v.begin(), v.end(), 0);
    do {
        Permutation s(v);
        st.reports.push_back(run_permutation_campaign(b, s, chirp, epsilon, count, seed, opt));
        st.worst_deviation = std::max(st.worst_deviation, st.reports.back().worst_population_deviation);
        st.sigmas.push_back(std::move(s));
    } while (std::next_permutation(v.begin(), v.end()));
    return st;
}

} // namespace adiapass
