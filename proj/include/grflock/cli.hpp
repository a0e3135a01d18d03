#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "grflock/io.hpp"
#include "grflock/logging.hpp"
#include "grflock/scenario_json.hpp"
#include "grflock/sim.hpp"

namespace grflock::cli {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitRuntimeError = 3;

/**
 * @brief Load, validate, run and emit trajectory/metrics/plot-data files
 *        plus a run manifest into out_dir.
 */
inline int cmd_run(const std::string& scenario_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override,
                   std::optional<int> steps_override) {
    Scenario sc;
    try {
        sc = load_scenario_file(scenario_path);
        if (seed_override) sc.seed = *seed_override;
        if (steps_override) sc.steps = *steps_override;
        const auto issues = validate_scenario(sc);
        if (!issues.empty()) {
            for (const auto& issue : issues) {
                std::fprintf(stderr, "error: %s: %s\n", issue.field.c_str(),
                             issue.message.c_str());
            }
            return kExitInputError;
        }
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }

    try {
        RunManifest manifest;
        manifest.scenario_path = scenario_path;
        manifest.seed = sc.seed;
        manifest.config_hash = config_hash(sc);
        manifest.started_at = iso8601_utc(std::chrono::system_clock::now());

        const TrajectoryLog log = run(sc);

        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        write_trajectory_csv(dir / "trajectory.csv", log);
        write_metrics_csv(dir / "metrics.csv", log);
        write_plot_data_csv(dir / "plot_data.csv", log);
        manifest.outputs = {"trajectory.csv", "metrics.csv", "plot_data.csv", "manifest.json"};
        manifest.finished_at = iso8601_utc(std::chrono::system_clock::now());
        write_manifest(dir / "manifest.json", manifest);

        std::printf("wrote %d steps for %zu robots to %s\n", sc.steps,
                    log.steps.empty() ? 0 : log.steps.front().robots.size(), out_dir.c_str());
        return kExitOk;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    } catch (const RuntimeFault& e) {
        std::fprintf(stderr, "runtime fault: %s\n", e.what());
        return kExitRuntimeError;
    }
}

/// Grid an outline file into a pattern file; prints the cell count.
inline int cmd_rasterize(const std::string& outline_path, std::optional<double> cell_size,
                         const std::string& out_path) {
    try {
        const OutlineFile of = load_outline_file(outline_path);
        double cs = 0.0;
        if (cell_size) {
            cs = *cell_size;
        } else if (of.cell_size) {
            cs = *of.cell_size;
        } else {
            throw ValidationError("cell-size",
                                  "no --cell-size given and the outline declares none");
        }
        const RegionPattern pattern = rasterize(of.outline, cs);
        if (!out_path.empty()) {
            const std::filesystem::path p(out_path);
            if (p.has_parent_path()) {
                std::filesystem::create_directories(p.parent_path());
            }
            write_pattern_file(p, pattern);
        }
        std::printf("%zu cells\n", pattern.size());
        return kExitOk;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
}

/// Full validation report; exit 0 iff the scenario is runnable.
inline int cmd_validate(const std::string& scenario_path) {
    try {
        const Scenario sc = load_scenario_file(scenario_path);
        const auto issues = validate_scenario(sc);
        if (issues.empty()) {
            std::printf("%s: OK (%d steps, seed %llu, config %s)\n", sc.name.c_str(), sc.steps,
                        static_cast<unsigned long long>(sc.seed), config_hash(sc).c_str());
            return kExitOk;
        }
        for (const auto& issue : issues) {
            std::printf("invalid: %s: %s\n", issue.field.c_str(), issue.message.c_str());
        }
        return kExitInputError;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
}

}  // namespace grflock::cli
