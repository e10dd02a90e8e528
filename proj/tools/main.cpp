#include "mtirl/commands.hpp"

#ifdef MTIRL_WITH_SERVICE
#include "mtirl/live/server.hpp"
#endif

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_manifest_options(CLI::App* cmd, mtirl::cli::RunManifest& m, std::uint64_t& seed) {
    auto* config = cmd->add_option("--config", m.config_path, "Key-value config file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", m.preset, "Built-in preset when no config is given")
        ->check(CLI::IsMember({"desk", "full"}))
        ->excludes(config);
    cmd->add_option("--out", m.out_dir, "Output directory (default: $MTIRL_OUT_DIR or ./results)");
    cmd->add_option("--seed", seed, "Override the config seed");
    cmd->add_option("--jobs", m.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--serial", m.serial, "Use the serial reference runner");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-trainer interactive RL: feedback aggregation experiments and live sessions"};
    app.require_subcommand(1);

    mtirl::cli::RunManifest agg;
    std::uint64_t agg_seed = 0;
    auto* aggregate = app.add_subcommand("aggregate", "Run the feedback aggregation accuracy experiment");
    add_manifest_options(aggregate, agg, agg_seed);
    aggregate->add_flag("--populations", agg.dump_populations, "Also dump every trainer population");

    mtirl::cli::RunManifest grid;
    std::uint64_t grid_seed = 0;
    auto* gridworld = app.add_subcommand("gridworld", "Run the grid-world MTIRL variant comparison");
    add_manifest_options(gridworld, grid, grid_seed);

    std::string map_path;
    std::string oracle_out = "oracle_q.csv";
    auto* oracle = app.add_subcommand("oracle", "Build the optimal Q-table and policy render for a map");
    oracle->add_option("--map", map_path, "Map JSON (default: bundled map)")->check(CLI::ExistingFile);
    oracle->add_option("--out", oracle_out, "Q-table CSV path");

    std::string check_path;
    auto* map_check = app.add_subcommand("map", "Validate a map file and print an ASCII preview");
    map_check->add_option("--map", check_path, "Map JSON (default: bundled map)")->check(CLI::ExistingFile);

#ifdef MTIRL_WITH_SERVICE
    mtirl::live::ServerOptions serve_opts;
    auto* serve = app.add_subcommand("serve", "Start the live session service");
    serve->add_option("--host", serve_opts.host, "Bind address");
    serve->add_option("--port", serve_opts.port, "TCP port (0 = ephemeral)");
    serve->add_option("--state-dir", serve_opts.state_dir, "Directory for paused-session snapshots");
#endif

    CLI11_PARSE(app, argc, argv);

    if (aggregate->parsed()) {
        if (aggregate->count("--seed") > 0) agg.seed = agg_seed;
        return mtirl::cli::cmd_aggregate(agg, std::cout, std::cerr);
    }
    if (gridworld->parsed()) {
        if (gridworld->count("--seed") > 0) grid.seed = grid_seed;
        return mtirl::cli::cmd_gridworld(grid, std::cout, std::cerr);
    }
    if (oracle->parsed()) {
        return mtirl::cli::cmd_oracle(map_path, oracle_out, std::cout, std::cerr);
    }
    if (map_check->parsed()) {
        return mtirl::cli::cmd_map_check(check_path, std::cout, std::cerr);
    }
#ifdef MTIRL_WITH_SERVICE
    if (serve->parsed()) {
        return mtirl::live::run_server(serve_opts, std::cout, std::cerr);
    }
#endif
    return 1;
}
