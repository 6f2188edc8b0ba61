#include <gtest/gtest.h>

#include <adiapass/run.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace adiapass;
namespace fs = std::filesystem;

namespace {

const char* kTransfer = R"J({
  "system": {"n_levels": 4, "deltas": [0, -1, 0.3, 0], "mu": [1, 5], "mus": [2, 3, 1.5]},
  "chirp": {"kind": "linear", "alpha": 4},
  "task": "transfer(0,2)",
  "simulation": {"epsilon": 0.03, "count": 2}
})J";

fs::path fresh(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("adiapass_run_" + name);
    fs::remove_all(p);
    return p;
}

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return json::parse(in);
}

} // namespace

TEST(Run, SynthWritesControlAndBranches)
{
    const fs::path d = fresh("synth");
    const auto r = run(parse_config_text(kTransfer), "synth", d);
    EXPECT_TRUE(fs::exists(d / "control.json"));
    EXPECT_TRUE(fs::exists(d / "branches.csv"));
    EXPECT_TRUE(fs::exists(d / "config.json"));
    const json ctl = read_json(d / "control.json");
    EXPECT_EQ(ctl["induced_permutation"][0], 2);
    EXPECT_EQ(ctl["crossings"].size(), 6u);
    fs::remove_all(d);
}

TEST(Run, SimulateWritesTrajectoryAndMatrix)
{
    const fs::path d = fresh("simulate");
    run(parse_config_text(kTransfer), "simulate", d);
    for (const char* f : {"trajectory.csv", "umatrix.csv", "umatrix.pgm", "report.json"})
        EXPECT_TRUE(fs::exists(d / f)) << f;
    const json rep = read_json(d / "report.json");
    EXPECT_LE(rep["unitarity_defect"].get<double>(), 1e-10);
    fs::remove_all(d);
}

TEST(Run, EnsembleReport)
{
    const fs::path d = fresh("ensemble");
    const auto r = run(parse_config_text(kTransfer), "ensemble", d);
    const json rep = read_json(d / "report.json");
    EXPECT_EQ(rep["per_system"].size(), 2u);
    EXPECT_TRUE(rep.contains("worst_case"));
    EXPECT_TRUE(fs::exists(d / "ensemble.csv"));
    fs::remove_all(d);
}

TEST(Run, ConfigRoundTripIsWritten)
{
    const fs::path d = fresh("roundtrip");
    const RunConfig c = parse_config_text(kTransfer);
    run(c, "branches", d);
    const RunConfig back = parse_config(fs::path(d / "config.json").string());
    EXPECT_EQ(to_json(back), to_json(c));
    fs::remove_all(d);
}

TEST(Run, FailedRunLeavesNoFiles)
{
    const fs::path d = fresh("failed");
    RunConfig c = parse_config_text(kTransfer);
    c.chirp = ChirpProfile::linear(1.0); // window misses crossings
    EXPECT_THROW(run(c, "synth", d), Error);
    EXPECT_FALSE(fs::exists(d));
}

TEST(Run, UnknownCommand)
{
    EXPECT_THROW(run(parse_config_text(kTransfer), "teleport", fresh("unknown")), ConfigError);
}
