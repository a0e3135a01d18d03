#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "grflock/errors.hpp"
#include "grflock/scenario_json.hpp"
#include "grflock/sim.hpp"
#include "grflock/version.hpp"

namespace grflock {

/// Shortest round-trip decimal form of a double; "inf" for infinities.
inline std::string format_double(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

/// Stable digest of the fully-resolved scenario (defaults and overrides
/// applied), as a 16-hex-digit string.
inline std::string config_hash(const Scenario& sc) {
    const std::uint64_t h = fnv1a64(resolved_scenario_json(sc).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("out", "cannot open " + path.string() + " for writing");
    }
    return out;
}

/// One row per (step, robot): t,id,px,py,vx,vy,ux,uy.
inline void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log) {
    auto out = open_for_write(path);
    out << "t,id,px,py,vx,vy,ux,uy\n";
    for (const auto& step : log.steps) {
        const std::string t = format_double(step.t);
        for (const auto& r : step.robots) {
            out << t << ',' << r.id << ',' << format_double(r.p.x) << ','
                << format_double(r.p.y) << ',' << format_double(r.v.x) << ','
                << format_double(r.v.y) << ',' << format_double(r.u.x) << ','
                << format_double(r.u.y) << '\n';
        }
    }
}

/// Per-step metric rows; absent metrics serialize as empty fields.
inline void write_metrics_csv(const std::filesystem::path& path, const TrajectoryLog& log) {
    auto out = open_for_write(path);
    out << "t,order,d_min,d_max_of_min,d_avg,d_beta_min,region_attraction_energy,coverage_cv\n";
    const auto opt = [](const std::optional<double>& v) {
        return v.has_value() ? format_double(*v) : std::string();
    };
    for (const auto& step : log.steps) {
        const auto& m = step.metrics;
        out << format_double(m.t) << ',' << format_double(m.order) << ','
            << format_double(m.d_min) << ',' << format_double(m.d_max_of_min) << ','
            << format_double(m.d_avg) << ',' << opt(m.d_beta_min) << ','
            << opt(m.region_attraction_energy) << ',' << opt(m.coverage_cv) << '\n';
    }
}

/// Long-format metric series (metric,t,value), ready for any plotting
/// stack without further reshaping.
inline void write_plot_data_csv(const std::filesystem::path& path, const TrajectoryLog& log) {
    auto out = open_for_write(path);
    out << "metric,t,value\n";
    const auto row = [&](const char* name, double t, double v) {
        out << name << ',' << format_double(t) << ',' << format_double(v) << '\n';
    };
    for (const auto& step : log.steps) {
        const auto& m = step.metrics;
        row("order", m.t, m.order);
        row("d_min", m.t, m.d_min);
        row("d_max_of_min", m.t, m.d_max_of_min);
        row("d_avg", m.t, m.d_avg);
        if (m.d_beta_min) row("d_beta_min", m.t, *m.d_beta_min);
        if (m.region_attraction_energy) {
            row("region_attraction_energy", m.t, *m.region_attraction_energy);
        }
        if (m.coverage_cv) row("coverage_cv", m.t, *m.coverage_cv);
    }
}

inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

struct RunManifest {
    std::string scenario_path;
    std::uint64_t seed = 0;
    std::string tool_version = kVersion;
    std::string config_hash;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
};

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    json j;
    j["scenario_path"] = m.scenario_path;
    j["seed"] = m.seed;
    j["tool_version"] = m.tool_version;
    j["config_hash"] = m.config_hash;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["outputs"] = m.outputs;
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
}

}  // namespace grflock
