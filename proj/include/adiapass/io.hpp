#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "branches.hpp"
#include "control.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "propagator.hpp"

namespace adiapass {

using json = nlohmann::json;

/// Writes `content` next to `path` under a temporary name, then renames it into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::random_device rd;
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw Error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

/// Artifacts are staged in memory and only land on disk in commit(), one atomic
/// rename each, so a run that throws before commit() leaves the directory untouched.
class ArtifactSet {
public:
    void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
    bool has(const std::string& name) const { return files_.count(name) > 0; }
    const std::string& get(const std::string& name) const { return files_.at(name); }
    std::vector<std::string> names() const
    {
        std::vector<std::string> n;
        for (const auto& [k, v] : files_)
            n.push_back(k);
        return n;
    }

    void commit(const std::filesystem::path& dir) const
    {
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : files_)
            atomic_write(dir / name, content);
    }

private:
    std::map<std::string, std::string> files_;
};

inline std::string fmt_num(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// ---- CSV ----

/// s, lambda_0..lambda_{N-1}, lambdaR_0..lambdaR_{N-1}
inline std::string branches_csv(const BranchDiagram& bd)
{
    std::ostringstream os;
    const int n = bd.n_levels();
    os << "s";
    for (int k = 0; k < n; ++k)
        os << ",lambda_" << k;
    for (int k = 0; k < n; ++k)
        os << ",lambdaR_" << k;
    os << "\n";
    for (std::size_t i = 0; i < bd.grid.size(); ++i) {
        os << fmt_num(bd.grid[i]);
        for (int k = 0; k < n; ++k)
            os << "," << fmt_num(bd.branches[k][i]);
        for (int k = 0; k < n; ++k)
            os << "," << fmt_num(bd.rotating[k][i]);
        os << "\n";
    }
    return os.str();
}

/// s, then |<p|U(s)|k>|^2 as column P<p>_from<k> for every requested k and every p
inline std::string trajectory_csv(const PropagatorTrajectory& tr, const std::vector<int>& from)
{
    std::ostringstream os;
    const auto n = tr.final().rows();
    os << "s";
    for (int k : from)
        for (Eigen::Index p = 0; p < n; ++p)
            os << ",P" << p << "_from" << k;
    os << "\n";
    for (std::size_t i = 0; i < tr.grid.size(); ++i) {
        os << fmt_num(tr.grid[i]);
        for (int k : from)
            for (Eigen::Index p = 0; p < n; ++p)
                os << "," << fmt_num(std::norm(tr.unitaries[i](p, k)));
        os << "\n";
    }
    return os.str();
}

/// row p, column k: |<p|U(1)|k>|^2
inline std::string matrix_csv(const Eigen::MatrixXd& m)
{
    std::ostringstream os;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << (c ? "," : "") << fmt_num(m(r, c));
        os << "\n";
    }
    return os.str();
}

// ---- images ----

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major, 0 black, 255 white

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255) : width(w), height(h), pixels(std::size_t(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

/// Binary 8-bit PGM (P5), maxval 255.
inline std::string to_pgm(const GrayImage& img)
{
    std::string s = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    s.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return s;
}

/// Value v in [0,1] maps to gray 255 (1 - v): 0 is white, 1 is black.
inline std::uint8_t gray_level(double v)
{
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - v)));
}

inline void paint_heatmap(GrayImage& img, const Eigen::MatrixXd& m, int x0, int y0, int cell)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const std::uint8_t g = gray_level(m(r, c));
            for (int dy = 0; dy < cell; ++dy)
                for (int dx = 0; dx < cell; ++dx)
                    img.at(x0 + int(c) * cell + dx, y0 + int(r) * cell + dy) = g;
        }
}

/// Heatmap of |U(1)|^2: row p (target level) top to bottom, column k (initial level).
inline GrayImage heatmap(const Eigen::MatrixXd& m, int cell = 32)
{
    GrayImage img(int(m.cols()) * cell, int(m.rows()) * cell);
    paint_heatmap(img, m, 0, 0, cell);
    return img;
}

/// Heatmaps on a grid with `cols` columns separated by a mid-gray frame.
inline GrayImage montage(const std::vector<Eigen::MatrixXd>& mats, int cols = 6, int cell = 12, int gap = 4)
{
    if (mats.empty())
        return {};
    const int n = int(mats.front().rows());
    const int rows = (int(mats.size()) + cols - 1) / cols;
    const int tile = n * cell;
    GrayImage img(cols * tile + (cols + 1) * gap, rows * tile + (rows + 1) * gap, 160);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const int cx = int(i) % cols, cy = int(i) / cols;
        paint_heatmap(img, mats[i], gap + cx * (tile + gap), gap + cy * (tile + gap), cell);
    }
    return img;
}

// ---- JSON ----

inline json to_json(const ChirpProfile& c)
{
    if (c.kind() == ChirpProfile::Kind::linear)
        return {{"kind", "linear"}, {"alpha", c.alpha()}, {"offset", c.offset()}};
    return {{"kind", "tabulated"}, {"s", c.table_s()}, {"omega", c.table_omega()}};
}

inline json to_json(const AmplitudeProfile& a)
{
    return {{"zero_set", a.zero_set},
            {"antizero_set", a.antizero_set},
            {"bump_width", a.bump_width},
            {"bump_height", a.bump_height},
            {"gain", a.gain}};
}

inline json to_json(const ControlProfile& c) { return {{"chirp", to_json(c.chirp)}, {"amplitude", to_json(c.amp)}}; }

inline ChirpProfile chirp_from_json(const json& j)
{
    const std::string kind = j.value("kind", "linear");
    if (kind == "linear")
        return ChirpProfile::linear(j.at("alpha").get<double>(), j.value("offset", 0.0));
    if (kind == "tabulated")
        return ChirpProfile::tabulated(j.at("s").get<std::vector<double>>(), j.at("omega").get<std::vector<double>>());
    throw ConfigError("chirp.kind must be 'linear' or 'tabulated', got '" + kind + "'");
}

inline ControlProfile control_from_json(const json& j)
{
    ControlProfile c;
    c.chirp = chirp_from_json(j.at("chirp"));
    const json& a = j.at("amplitude");
    c.amp.zero_set = a.at("zero_set").get<std::vector<double>>();
    c.amp.antizero_set = a.value("antizero_set", std::vector<double>{});
    c.amp.bump_width = a.value("bump_width", 0.05);
    c.amp.bump_height = a.value("bump_height", 3.0);
    c.amp.gain = a.value("gain", 1.0);
    return c;
}

inline json matrix_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const EnsembleReport& r)
{
    json members = json::array();
    for (const auto& m : r.per_system) {
        json fid = json::array();
        for (std::size_t i = 0; i < r.targets.size(); ++i)
            fid.push_back({{"k", r.targets[i].first}, {"target", r.targets[i].second}, {"fidelity", m.fidelity[i]}});
        json jm = {{"mus", m.mus},
                   {"deltas", m.deltas},
                   {"fidelity", fid},
                   {"populations", matrix_json(m.populations)},
                   {"unitarity_defect", m.unitarity_defect}};
        if (m.halving_difference)
            jm["halving_difference"] = *m.halving_difference;
        members.push_back(jm);
    }
    return {{"epsilon", r.epsilon},
            {"seed", r.seed},
            {"worst_case", r.worst_case},
            {"mean", r.mean},
            {"worst_population_deviation", r.worst_population_deviation},
            {"control", to_json(r.control)},
            {"per_system", members}};
}

} // namespace adiapass
