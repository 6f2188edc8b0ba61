#pragma once

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "chirp.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "io.hpp"
#include "ladder.hpp"
#include "propagator.hpp"
#include "synthesis.hpp"

namespace adiapass {

/// What the control is designed to do.
struct TargetConfig {
    std::string kind = "inversion"; // inversion | transfer | permutation | all_permutations
    int l = 0;
    int p = 0;
    std::vector<int> images;
};

struct RunConfig {
    // system
    int n_levels = 4;
    std::optional<std::vector<double>> deltas; // fixed anharmonicities
    double delta_bound = 0.0;                  // used when deltas are not fixed
    double mu_min = 1.0;
    double mu_max = 5.0;
    std::optional<std::vector<double>> mus; // explicit single system for simulate/branches
    double omega0 = 200.0;

    ChirpProfile chirp = ChirpProfile::linear(8.0);

    double bump_width = 0.05;
    double bump_height = 3.0;
    double gain = 1.0;
    double peak = 0.0; // > 0: normalize max |A| to this value
    std::optional<std::vector<double>> zero_set; // overrides the synthesized zeros

    std::string mode = "ensemble"; // ensemble | sweep | branches | labframe (from the task block)
    TargetConfig target;
    std::vector<double> epsilons{std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
    std::vector<double> omega0_factors{100.0, 500.0, 2000.0};
    int samples_per_period = 64;

    double epsilon = 1e-3;
    int n_steps = 0;
    std::uint64_t seed = 42;
    int count = 10;
    std::string scheme = "midpoint";
    bool check_convergence = false;
    int threads = 0;

    std::string output_directory = "out";
    std::vector<std::string> formats{"csv", "json", "pgm"};

    EnsembleBounds bounds() const
    {
        EnsembleBounds b;
        b.n_levels = n_levels;
        b.mu_min = mu_min;
        b.mu_max = mu_max;
        b.delta_bound = delta_bound;
        b.fixed_deltas = deltas;
        b.omega0 = omega0;
        return b;
    }

    Task task() const
    {
        if (target.kind == "transfer")
            return Task::transfer(target.l, target.p);
        if (target.kind == "permutation")
            return Task::permutation(Permutation(target.images));
        return Task::permutation(Permutation::reversal(n_levels));
    }

    CampaignOptions campaign_options() const
    {
        CampaignOptions o;
        o.bump_width = bump_width;
        o.bump_height = bump_height;
        o.gain = gain;
        o.peak = peak;
        o.n_steps = n_steps;
        o.scheme = scheme == "magnus4" ? Scheme::magnus4 : Scheme::midpoint;
        o.check_convergence = check_convergence;
        o.threads = threads;
        return o;
    }

    SimulationConfig simulation() const
    {
        SimulationConfig s;
        s.epsilon = epsilon;
        s.n_steps = n_steps;
        s.scheme = scheme == "magnus4" ? Scheme::magnus4 : Scheme::midpoint;
        s.check_convergence = check_convergence;
        return s;
    }

    bool wants(const std::string& format) const
    {
        return std::find(formats.begin(), formats.end(), format) != formats.end();
    }
};

namespace detail {

[[noreturn]] inline void bad_field(const std::string& field, const std::string& why)
{
    throw ConfigError("invalid field '" + field + "': " + why);
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& path)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad_field(path, e.what());
    }
}

// "transfer(0,2)", "permutation(2,0,3,1)", "inversion", "branches", ...
inline json task_from_string(const std::string& s)
{
    static const std::regex re(R"(^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re))
        bad_field("task", "cannot read '" + s + "'");
    const std::string kind = m[1];
    std::vector<int> args;
    std::stringstream ss(m[2].str());
    for (std::string tok; std::getline(ss, tok, ',');)
        if (tok.find_first_not_of(" \t") != std::string::npos) {
            try {
                args.push_back(std::stoi(tok));
            } catch (...) {
                bad_field("task", "non-integer argument '" + tok + "'");
            }
        }
    if (kind == "transfer") {
        if (args.size() != 2)
            bad_field("task", "transfer needs (l,p)");
        return {{"kind", kind}, {"l", args[0]}, {"p", args[1]}};
    }
    if (kind == "permutation")
        return {{"kind", kind}, {"images", args}};
    return {{"kind", kind}};
}

inline void read_target(const json& t, TargetConfig& out, const std::string& path)
{
    const json tj = t.is_string() ? task_from_string(t.get<std::string>()) : t;
    out.kind = tj.value("kind", "inversion");
    if (out.kind == "transfer") {
        out.l = get_field<int>(tj, "l", path + ".l");
        out.p = get_field<int>(tj, "p", path + ".p");
    } else if (out.kind == "permutation") {
        out.images = get_field<std::vector<int>>(tj, "images", path + ".images");
    } else if (out.kind != "inversion" && out.kind != "all_permutations") {
        bad_field(path + ".kind", "unknown target '" + out.kind + "'");
    }
}

inline std::string line_info(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

inline void validate(const RunConfig& c)
{
    using detail::bad_field;
    if (c.n_levels < 2)
        bad_field("system.n_levels", "must be >= 2");
    if (c.deltas && static_cast<int>(c.deltas->size()) != c.n_levels)
        bad_field("system.deltas", "must have n_levels entries");
    if (c.mus) {
        if (static_cast<int>(c.mus->size()) != c.n_levels - 1)
            bad_field("system.mus", "must have n_levels-1 entries");
        for (double m : *c.mus)
            if (!(m > 0))
                bad_field("system.mus", "entries must be positive");
    }
    if (!(c.mu_min > 0) || !(c.mu_min < c.mu_max))
        bad_field("system.mu", "need 0 < mu_min < mu_max");
    if (c.delta_bound < 0)
        bad_field("system.delta_bound", "must be >= 0");
    if (!(c.omega0 > 0))
        bad_field("system.omega0", "must be positive");
    if (!(c.bump_width > 0))
        bad_field("amplitude.bump_width", "must be positive");
    if (c.bump_height < 0)
        bad_field("amplitude.bump_height", "must be >= 0");
    if (!(c.gain > 0))
        bad_field("amplitude.gain", "must be positive");
    if (c.peak < 0)
        bad_field("amplitude.peak", "must be >= 0");
    if (!(c.epsilon > 0))
        bad_field("simulation.epsilon", "must be positive");
    if (c.n_steps < 0)
        bad_field("simulation.n_steps", "must be >= 0");
    if (c.count < 1)
        bad_field("simulation.count", "must be >= 1");
    if (c.scheme != "midpoint" && c.scheme != "magnus4")
        bad_field("simulation.scheme", "must be 'midpoint' or 'magnus4'");
    const auto& t = c.target;
    if (t.kind == "transfer" && (t.l < 0 || t.l >= c.n_levels || t.p < 0 || t.p >= c.n_levels))
        bad_field("task.l/p", "level index out of range");
    if (t.kind == "permutation") {
        if (static_cast<int>(t.images.size()) != c.n_levels)
            bad_field("task.images", "must have n_levels entries");
        try {
            Permutation p(t.images);
        } catch (const DomainError&) {
            bad_field("task.images", "not a bijection on 0..n_levels-1");
        }
    }
    if (c.mode != "ensemble" && c.mode != "sweep" && c.mode != "branches" && c.mode != "labframe")
        bad_field("task.kind", "unknown task '" + c.mode + "'");
    if (c.epsilons.size() < 3)
        bad_field("task.epsilons", "need at least 3 values");
    for (std::size_t i = 1; i < c.epsilons.size(); ++i)
        if (!(c.epsilons[i] < c.epsilons[i - 1]))
            bad_field("task.epsilons", "must be strictly descending");
}

/// Accepts the nested layout {system, chirp, amplitude, task, simulation, output}
/// and flat shorthands (n_levels, deltas, mu, alpha, epsilon, ...) at top level.
inline RunConfig config_from_json(const json& root)
{
    using detail::get_field;
    if (!root.is_object())
        throw ConfigError("configuration must be a JSON object");
    RunConfig c;
    const json empty = json::object();
    const json& sys = root.contains("system") ? root["system"] : root;
    const json& sim = root.contains("simulation") ? root["simulation"] : root;
    const std::string sp = root.contains("system") ? "system." : "";
    const std::string mp = root.contains("simulation") ? "simulation." : "";

    if (sys.contains("n_levels"))
        c.n_levels = get_field<int>(sys, "n_levels", sp + "n_levels");
    if (sys.contains("deltas"))
        c.deltas = get_field<std::vector<double>>(sys, "deltas", sp + "deltas");
    if (sys.contains("delta_bound"))
        c.delta_bound = get_field<double>(sys, "delta_bound", sp + "delta_bound");
    if (sys.contains("mu")) {
        const auto mu = get_field<std::vector<double>>(sys, "mu", sp + "mu");
        if (mu.size() != 2)
            detail::bad_field(sp + "mu", "expected [mu_min, mu_max]");
        c.mu_min = mu[0];
        c.mu_max = mu[1];
    }
    if (sys.contains("mu_min"))
        c.mu_min = get_field<double>(sys, "mu_min", sp + "mu_min");
    if (sys.contains("mu_max"))
        c.mu_max = get_field<double>(sys, "mu_max", sp + "mu_max");
    if (sys.contains("mus"))
        c.mus = get_field<std::vector<double>>(sys, "mus", sp + "mus");
    if (sys.contains("omega0"))
        c.omega0 = get_field<double>(sys, "omega0", sp + "omega0");
    if (!sys.contains("n_levels") && c.deltas)
        c.n_levels = static_cast<int>(c.deltas->size());

    try {
        if (root.contains("chirp"))
            c.chirp = chirp_from_json(root["chirp"]);
        else if (root.contains("alpha"))
            c.chirp = ChirpProfile::linear(get_field<double>(root, "alpha", "alpha"), root.value("offset", 0.0));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        detail::bad_field("chirp", e.what());
    }

    const json& amp = root.contains("amplitude") ? root["amplitude"] : empty;
    const std::string ap = "amplitude.";
    if (amp.contains("bump_width"))
        c.bump_width = get_field<double>(amp, "bump_width", ap + "bump_width");
    if (amp.contains("bump_height"))
        c.bump_height = get_field<double>(amp, "bump_height", ap + "bump_height");
    if (amp.contains("gain"))
        c.gain = get_field<double>(amp, "gain", ap + "gain");
    if (amp.contains("peak"))
        c.peak = get_field<double>(amp, "peak", ap + "peak");
    if (amp.contains("zero_set"))
        c.zero_set = get_field<std::vector<double>>(amp, "zero_set", ap + "zero_set");

    if (root.contains("task")) {
        const json& t = root["task"];
        const json tj = t.is_string() ? detail::task_from_string(t.get<std::string>()) : t;
        const std::string kind = tj.value("kind", "inversion");
        if (kind == "sweep" || kind == "branches" || kind == "labframe") {
            c.mode = kind;
            if (tj.contains("target"))
                detail::read_target(tj["target"], c.target, "task.target");
            if (tj.contains("epsilons"))
                c.epsilons = get_field<std::vector<double>>(tj, "epsilons", "task.epsilons");
            if (tj.contains("omega0_factors"))
                c.omega0_factors = get_field<std::vector<double>>(tj, "omega0_factors", "task.omega0_factors");
            if (tj.contains("samples_per_period"))
                c.samples_per_period = get_field<int>(tj, "samples_per_period", "task.samples_per_period");
        } else {
            c.mode = "ensemble";
            detail::read_target(tj, c.target, "task");
        }
    }

    if (sim.contains("epsilon"))
        c.epsilon = get_field<double>(sim, "epsilon", mp + "epsilon");
    if (sim.contains("n_steps"))
        c.n_steps = get_field<int>(sim, "n_steps", mp + "n_steps");
    if (sim.contains("seed"))
        c.seed = get_field<std::uint64_t>(sim, "seed", mp + "seed");
    if (sim.contains("count"))
        c.count = get_field<int>(sim, "count", mp + "count");
    if (sim.contains("scheme"))
        c.scheme = get_field<std::string>(sim, "scheme", mp + "scheme");
    if (sim.contains("check_convergence"))
        c.check_convergence = get_field<bool>(sim, "check_convergence", mp + "check_convergence");
    if (sim.contains("threads"))
        c.threads = get_field<int>(sim, "threads", mp + "threads");

    if (root.contains("output")) {
        const json& o = root["output"];
        if (o.contains("directory"))
            c.output_directory = get_field<std::string>(o, "directory", "output.directory");
        if (o.contains("formats"))
            c.formats = get_field<std::vector<std::string>>(o, "formats", "output.formats");
    }
    validate(c);
    return c;
}

inline RunConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error at " + detail::line_info(text, e.byte > 0 ? e.byte - 1 : 0) + ": "
                          + e.what());
    }
    return config_from_json(j);
}

inline RunConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline json target_json(const TargetConfig& t)
{
    json j = {{"kind", t.kind}};
    if (t.kind == "transfer") {
        j["l"] = t.l;
        j["p"] = t.p;
    } else if (t.kind == "permutation") {
        j["images"] = t.images;
    }
    return j;
}

/// Nested layout with every default materialized.
inline json to_json(const RunConfig& c)
{
    json sys = {{"n_levels", c.n_levels},
                {"delta_bound", c.delta_bound},
                {"mu", {c.mu_min, c.mu_max}},
                {"omega0", c.omega0}};
    if (c.deltas)
        sys["deltas"] = *c.deltas;
    if (c.mus)
        sys["mus"] = *c.mus;
    json amp = {{"bump_width", c.bump_width}, {"bump_height", c.bump_height}, {"gain", c.gain}, {"peak", c.peak}};
    if (c.zero_set)
        amp["zero_set"] = *c.zero_set;
    json task;
    if (c.mode == "ensemble") {
        task = target_json(c.target);
    } else {
        task = {{"kind", c.mode},
                {"target", target_json(c.target)},
                {"epsilons", c.epsilons},
                {"omega0_factors", c.omega0_factors},
                {"samples_per_period", c.samples_per_period}};
    }
    return {{"system", sys},
            {"chirp", to_json(c.chirp)},
            {"amplitude", amp},
            {"task", task},
            {"simulation",
             {{"epsilon", c.epsilon},
              {"n_steps", c.n_steps},
              {"seed", c.seed},
              {"count", c.count},
              {"scheme", c.scheme},
              {"check_convergence", c.check_convergence},
              {"threads", c.threads}}},
            {"output", {{"directory", c.output_directory}, {"formats", c.formats}}}};
}

} // namespace adiapass
