#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grflock/cli.hpp"
#include "grflock/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"grflock: predictive swarm-flocking simulator with region-based shape control"};
    app.set_version_flag("--version", std::string(grflock::kVersion));
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::string outline_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<double> cell_size;

    auto* run = app.add_subcommand("run", "Run a scenario and write trajectory/metric files");
    run->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--steps", steps, "Override the scenario step count");

    auto* rasterize = app.add_subcommand("rasterize", "Grid an outline into a pattern file");
    rasterize->add_option("--outline", outline_path, "Outline file (JSON)")->required();
    rasterize->add_option("--cell-size", cell_size, "Grid pitch in meters");
    rasterize->add_option("--out", out_path, "Pattern file to write");

    auto* validate = app.add_subcommand("validate", "Check a scenario file and report issues");
    validate->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : grflock::cli::kExitInputError;
    }

    if (run->parsed()) {
        return grflock::cli::cmd_run(scenario_path, out_dir, seed, steps);
    }
    if (rasterize->parsed()) {
        return grflock::cli::cmd_rasterize(outline_path, cell_size, out_path);
    }
    return grflock::cli::cmd_validate(scenario_path);
}
