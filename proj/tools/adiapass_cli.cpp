#include <adiapass/run.hpp>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    // verbosity: ADIAPASS_LOG=debug|info|warn|error|off
    auto logger = spdlog::stderr_color_mt("adiapass");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lv = std::getenv("ADIAPASS_LOG"))
        spdlog::set_level(spdlog::level::from_str(lv));

    CLI::App app{"Adiabatic-passage control synthesis and simulation for quantum ladders"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool check = false;
    for (const auto& name : adiapass::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (default: output.directory from the config)");
        sub->add_flag("--check-convergence", check, "verify each integration against one with twice the steps");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        adiapass::RunConfig cfg = adiapass::parse_config(config_path);
        if (check)
            cfg.check_convergence = true;
        const auto res = adiapass::run(cfg, command, out_dir);
        std::cout << res.summary.dump(2) << "\n";
        for (const auto& f : res.files)
            std::cout << (res.directory / f).string() << "\n";
    } catch (const adiapass::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << command << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
