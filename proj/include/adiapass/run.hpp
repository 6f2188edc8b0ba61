#pragma once

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "branches.hpp"
#include "config.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "io.hpp"
#include "lab_frame.hpp"
#include "propagator.hpp"
#include "synthesis.hpp"

namespace adiapass {

/// Single system used by synth/simulate/branches: explicit mus/deltas when given,
/// otherwise the first member of the seeded ensemble.
inline LadderSystem single_system(const RunConfig& c)
{
    LadderSystem first = sample_ensemble(c.bounds(), 1, c.seed).front();
    if (c.mus)
        first.mus = *c.mus;
    if (c.deltas)
        first.deltas = *c.deltas;
    first.validate();
    return first;
}

/// The control applied by every command. A zero_set in the config replaces synthesis.
inline ControlProfile make_control(const RunConfig& c)
{
    const EnsembleBounds b = c.bounds();
    if (c.zero_set) {
        if (!b.fixed_deltas)
            return scaled({c.chirp, AmplitudeProfile{*c.zero_set, {}, c.bump_width, c.bump_height}}, c.campaign_options());
        const LadderSystem nominal = b.nominal_system();
        return scaled(
            {c.chirp, build_amplitude(*c.zero_set, crossing_set(nominal, c.chirp), c.bump_width, c.bump_height)},
            c.campaign_options());
    }
    return campaign_control(b, c.task(), c.chirp, c.campaign_options());
}

inline json design_json(const RunConfig& c, const ControlProfile& control)
{
    json j = to_json(control);
    if (c.bounds().fixed_deltas) {
        const LadderSystem nominal = c.bounds().nominal_system();
        const CrossingSet cs = crossing_set(nominal, c.chirp, false);
        json crossings = json::array();
        for (const auto& x : cs.entries)
            crossings.push_back({{"m", x.m}, {"n", x.n}, {"s", x.s_cross}, {"omega", x.omega_cross}});
        j["crossings"] = crossings;
        const auto tr = trace_crossings(nominal, cs, designated_pairs(cs, control.amp));
        j["induced_permutation"] = tr.permutation;
    }
    return j;
}

struct RunResult {
    std::filesystem::path directory;
    std::vector<std::string> files;
    json summary;
};

namespace detail {

inline void add_common(ArtifactSet& out, const RunConfig& c, const ControlProfile& control)
{
    if (c.wants("json"))
        out.add("control.json", design_json(c, control).dump(2) + "\n");
}

inline json run_synth(const RunConfig& c, ArtifactSet& out)
{
    const ControlProfile control = make_control(c);
    add_common(out, c, control);
    if (c.wants("csv")) {
        const LadderSystem sys = single_system(c);
        const auto bd = track_branches(sys, control, default_grid(crossing_set(sys, c.chirp, false)), false);
        out.add("branches.csv", branches_csv(bd));
    }
    return {{"zero_set", control.amp.zero_set}, {"antizero_set", control.amp.antizero_set}};
}

inline json run_branches(const RunConfig& c, ArtifactSet& out)
{
    const ControlProfile control = make_control(c);
    const LadderSystem sys = single_system(c);
    const auto bd = track_branches(sys, control, default_grid(crossing_set(sys, c.chirp, false)), false);
    add_common(out, c, control);
    out.add("branches.csv", branches_csv(bd));
    json ev = json::array();
    for (const auto& e : bd.swap_events)
        ev.push_back({{"s", e.s}, {"rank", e.rank}, {"m", e.m}, {"n", e.n}});
    return {{"swap_events", ev}, {"permutation", bd.permutation}, {"grid_points", bd.grid.size()}};
}

inline json run_simulate(const RunConfig& c, ArtifactSet& out)
{
    const ControlProfile control = make_control(c);
    const LadderSystem sys = single_system(c);
    std::vector<double> cps;
    for (int i = 0; i <= 200; ++i)
        cps.push_back(i / 200.0);
    const auto tr = integrate_u(sys, control, c.simulation(), cps);
    const Task task = c.task();
    std::vector<int> from;
    json fid = json::array();
    for (auto [k, t] : task.targets()) {
        from.push_back(k);
        fid.push_back({{"k", k}, {"target", t}, {"fidelity", transfer_fidelity(tr.final(), k, t)}});
    }
    const Eigen::MatrixXd pops = populations(tr.final());
    add_common(out, c, control);
    if (c.wants("csv")) {
        out.add("trajectory.csv", trajectory_csv(tr, from));
        out.add("umatrix.csv", matrix_csv(pops));
    }
    if (c.wants("pgm"))
        out.add("umatrix.pgm", to_pgm(heatmap(pops)));
    json rep = {{"system", {{"deltas", sys.deltas}, {"mus", sys.mus}}},
                {"epsilon", c.epsilon},
                {"n_steps", tr.n_steps},
                {"unitarity_defect", tr.unitarity_defect},
                {"fidelity", fid},
                {"populations", matrix_json(pops)}};
    if (tr.halving_difference)
        rep["halving_difference"] = *tr.halving_difference;
    if (c.wants("json"))
        out.add("report.json", rep.dump(2) + "\n");
    return {{"fidelity", fid}};
}

inline json run_all_permutations(const RunConfig& c, ArtifactSet& out)
{
    const auto st = all_permutations_study(c.bounds(), c.chirp, c.epsilon, c.count, c.seed, c.campaign_options());
    std::vector<Eigen::MatrixXd> worst;
    std::ostringstream csv;
    csv << "sigma,zeros,worst_population_deviation,worst_fidelity\n";
    json rows = json::array();
    for (std::size_t i = 0; i < st.sigmas.size(); ++i) {
        const auto& r = st.reports[i];
        // montage shows the member with the largest deviation
        std::size_t w = 0;
        double wd = -1;
        for (std::size_t m = 0; m < r.per_system.size(); ++m) {
            double d = 0;
            for (Eigen::Index a = 0; a < r.per_system[m].populations.rows(); ++a)
                for (Eigen::Index b = 0; b < r.per_system[m].populations.cols(); ++b)
                    d = std::max(d, std::abs(r.per_system[m].populations(a, b)
                                             - (st.sigmas[i](int(b)) == a ? 1.0 : 0.0)));
            if (d > wd) {
                wd = d;
                w = m;
            }
        }
        worst.push_back(r.per_system[w].populations);
        std::string name;
        for (int v : st.sigmas[i].images)
            name += std::to_string(v);
        csv << name << "," << (r.control.amp.zero_set.size() - 2) << "," << fmt_num(r.worst_population_deviation)
            << "," << fmt_num(r.worst_case) << "\n";
        rows.push_back({{"sigma", st.sigmas[i].images},
                        {"zero_set", r.control.amp.zero_set},
                        {"worst_population_deviation", r.worst_population_deviation},
                        {"worst_case", r.worst_case}});
    }
    if (c.wants("csv"))
        out.add("permutations.csv", csv.str());
    if (c.wants("pgm"))
        out.add("montage.pgm", to_pgm(montage(worst)));
    json rep = {{"epsilon", c.epsilon}, {"seed", c.seed}, {"worst_deviation", st.worst_deviation}, {"permutations", rows}};
    if (c.wants("json"))
        out.add("report.json", rep.dump(2) + "\n");
    return {{"worst_deviation", st.worst_deviation}};
}

inline json run_ensemble(const RunConfig& c, ArtifactSet& out)
{
    if (c.target.kind == "all_permutations")
        return run_all_permutations(c, out);
    const ControlProfile control = make_control(c);
    const Task task = c.task();
    EnsembleReport rep = run_campaign(sample_ensemble(c.bounds(), c.count, c.seed), control, task, c.epsilon,
                                      c.campaign_options());
    rep.seed = c.seed;
    add_common(out, c, control);
    if (c.wants("csv")) {
        std::ostringstream os;
        os << "member";
        for (std::size_t j = 0; j < rep.per_system.front().mus.size(); ++j)
            os << ",mu_" << j;
        for (std::size_t j = 0; j < rep.per_system.front().deltas.size(); ++j)
            os << ",delta_" << j;
        for (auto [k, t] : rep.targets)
            os << ",fidelity_" << k << "_to_" << t;
        os << "\n";
        for (std::size_t i = 0; i < rep.per_system.size(); ++i) {
            const auto& m = rep.per_system[i];
            os << i;
            for (double v : m.mus)
                os << "," << fmt_num(v);
            for (double v : m.deltas)
                os << "," << fmt_num(v);
            for (double v : m.fidelity)
                os << "," << fmt_num(v);
            os << "\n";
        }
        out.add("ensemble.csv", os.str());
    }
    std::size_t worst = 0;
    for (std::size_t i = 0; i < rep.per_system.size(); ++i)
        if (*std::max_element(rep.per_system[i].fidelity.begin(), rep.per_system[i].fidelity.end())
            > *std::max_element(rep.per_system[worst].fidelity.begin(), rep.per_system[worst].fidelity.end()))
            worst = i;
    if (c.wants("csv"))
        out.add("umatrix.csv", matrix_csv(rep.per_system[worst].populations));
    if (c.wants("pgm"))
        out.add("umatrix.pgm", to_pgm(heatmap(rep.per_system[worst].populations)));
    if (c.wants("json"))
        out.add("report.json", to_json(rep).dump(2) + "\n");
    return {{"worst_case", rep.worst_case}, {"mean", rep.mean}};
}

inline json run_sweep(const RunConfig& c, ArtifactSet& out)
{
    const auto res = epsilon_sweep(c.bounds(), c.task(), c.chirp, c.epsilons, c.count, c.seed, c.campaign_options());
    std::ostringstream os;
    os << "epsilon,worst_case,mean\n";
    for (std::size_t i = 0; i < res.epsilons.size(); ++i)
        os << fmt_num(res.epsilons[i]) << "," << fmt_num(res.worst_case[i]) << "," << fmt_num(res.reports[i].mean)
           << "\n";
    if (c.wants("csv"))
        out.add("sweep.csv", os.str());
    json rep = {{"epsilons", res.epsilons},
                {"worst_case", res.worst_case},
                {"slope", res.slope},
                {"strictly_decreasing", res.strictly_decreasing()},
                {"non_increasing", res.non_increasing()},
                {"control", to_json(res.reports.front().control)}};
    if (c.wants("json"))
        out.add("report.json", rep.dump(2) + "\n");
    return {{"slope", res.slope}, {"non_increasing", res.non_increasing()}};
}

inline json run_labframe(const RunConfig& c, ArtifactSet& out)
{
    const ControlProfile control = make_control(c);
    const LadderSystem base = single_system(c);
    const double scale = base.max_abs_delta();
    if (!(scale > 0))
        throw ScaleSeparationError("lab-frame sweep needs a nonzero anharmonicity to set the omega0 scale");
    std::vector<int> from;
    for (auto [k, t] : c.task().targets())
        from.push_back(k);
    LabFrameOptions opt;
    opt.initial_level = from.front();
    opt.samples_per_period = c.samples_per_period;
    std::vector<double> cps;
    for (int i = 0; i <= 20; ++i)
        cps.push_back(i / 20.0);

    std::ostringstream os;
    os << "omega0_factor,omega0,final_discrepancy,max_discrepancy,lab_steps\n";
    json rows = json::array();
    std::vector<double> finals;
    for (double f : c.omega0_factors) {
        LadderSystem sys = base;
        sys.omega0 = f * scale;
        spdlog::info("lab frame: omega0 = {} ({} x max|Delta|)", sys.omega0, f);
        const auto rep = lab_frame_validate(sys, control, c.simulation(), cps, opt);
        finals.push_back(rep.final_discrepancy);
        os << fmt_num(f) << "," << fmt_num(sys.omega0) << "," << fmt_num(rep.final_discrepancy) << ","
           << fmt_num(rep.max_discrepancy) << "," << rep.lab_steps << "\n";
        rows.push_back({{"omega0", sys.omega0},
                        {"final_discrepancy", rep.final_discrepancy},
                        {"max_discrepancy", rep.max_discrepancy},
                        {"lab_final_populations", rep.lab_populations.back()},
                        {"rwa_final_populations", rep.rwa_populations.back()}});
    }
    bool monotone = true;
    for (std::size_t i = 1; i < finals.size(); ++i)
        monotone = monotone && finals[i] < finals[i - 1];
    if (c.wants("csv"))
        out.add("labframe.csv", os.str());
    json rep = {{"initial_level", opt.initial_level}, {"runs", rows}, {"monotone", monotone}};
    if (c.wants("json"))
        out.add("report.json", rep.dump(2) + "\n");
    return {{"monotone", monotone}, {"final_discrepancy", finals}};
}

} // namespace detail

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names{"synth", "simulate", "ensemble", "sweep", "branches", "labframe"};
    return names;
}

/// Runs `command` (default: the config's task mode) and writes artifacts to `out_dir`
/// (default: output.directory). Nothing is written unless the whole command succeeds.
inline RunResult run(const RunConfig& c, std::string command = {}, std::filesystem::path out_dir = {})
{
    if (command.empty())
        command = c.mode;
    if (out_dir.empty())
        out_dir = c.output_directory;
    const auto t0 = std::chrono::steady_clock::now();
    spdlog::info("{}: n_levels={} epsilon={} count={} seed={}", command, c.n_levels, c.epsilon, c.count, c.seed);

    ArtifactSet out;
    json summary;
    if (command == "synth")
        summary = detail::run_synth(c, out);
    else if (command == "simulate")
        summary = detail::run_simulate(c, out);
    else if (command == "ensemble")
        summary = detail::run_ensemble(c, out);
    else if (command == "sweep")
        summary = detail::run_sweep(c, out);
    else if (command == "branches")
        summary = detail::run_branches(c, out);
    else if (command == "labframe")
        summary = detail::run_labframe(c, out);
    else
        throw ConfigError("unknown command '" + command + "'");

    if (c.wants("json"))
        out.add("config.json", to_json(c).dump(2) + "\n");
    out.commit(out_dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    spdlog::info("{}: wrote {} files to {} in {:.2f}s", command, out.names().size(), out_dir.string(), secs);
    return {out_dir, out.names(), summary};
}

} // namespace adiapass
