#include "mtirl/commands.hpp"

#include "mtirl/config.hpp"
#include "mtirl/oracle.hpp"
#include "mtirl/sim_trainers.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace mtirl::cli {

namespace fs = std::filesystem;

namespace {

KeyValueConfig load_config(const RunManifest& m) {
    if (!m.config_path.empty()) {
        return KeyValueConfig::load(m.config_path);
    }
    return KeyValueConfig::parse(preset_text(m.preset.empty() ? "desk" : m.preset));
}

fs::path prepare_out_dir(const RunManifest& m) {
    const fs::path dir = resolve_out_dir(m.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("output directory '" + dir.string() + "' is not writable");
    }
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

Execution execution_of(const RunManifest& m) { return m.serial ? Execution::serial : Execution::parallel; }

GridMap load_map(const std::string& path) {
    GridMap map = path.empty() ? GridMap::default_map() : GridMap::load(path);
    if (!map.unreachable_cells().empty()) {
        throw MapError("map: cell " + to_string(map.unreachable_cells().front()) + " cannot reach the goal " +
                       to_string(map.goal()));
    }
    return map;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

std::string resolve_out_dir(const std::string& requested) {
    if (!requested.empty()) {
        return requested;
    }
    if (const char* env = std::getenv("MTIRL_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "results";
}

int cmd_aggregate(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        KeyValueConfig kv = load_config(manifest);
        if (manifest.seed) {
            kv.set("aggregation.seed", std::to_string(*manifest.seed));
        }
        const AggExpConfig config = aggregation_config_from(kv);
        const fs::path dir = prepare_out_dir(manifest);
        const OutputHeader header{"aggregation", kv.hash(), config.seed};

        const auto rows = run_aggregation_experiment(config, execution_of(manifest), manifest.jobs);
        {
            auto f = open_output(dir / "aggregation_results.csv");
            write_results_csv(f, header, rows, false);
        }
        {
            auto f = open_output(dir / "aggregation_summary.csv");
            write_summary_csv(f, header, rows, false);
        }
        if (manifest.dump_populations) {
            auto f = open_output(dir / "aggregation_populations.csv");
            f << "# experiment=aggregation config_hash=" << header.config_hash << " seed=" << header.seed << '\n';
            f << "trust_mean,trust_std,repeat,trainer_id,true_trust\n";
            for (double mean : config.trust_means) {
                for (double sd : config.trust_stds) {
                    for (std::size_t r = 0; r < config.repeats; ++r) {
                        for (const auto& p : aggregation_population(config, mean, sd, r)) {
                            f << format_double(mean) << ',' << format_double(sd) << ',' << r << ',' << p.id << ','
                              << format_double(p.true_trust) << '\n';
                        }
                    }
                }
            }
        }
        const std::size_t n = config.methods.size();
        print_significance_matrix(out, significance_matrix(rows), 0.05, n * (n - 1) / 2);
        out << "wrote " << rows.size() << " runs to " << dir.string() << '\n';
        return 0;
    });
}

int cmd_gridworld(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        KeyValueConfig kv = load_config(manifest);
        if (manifest.seed) {
            kv.set("gridworld.seed", std::to_string(*manifest.seed));
        }
        const GridExpConfig config = gridworld_config_from(kv);
        const GridMap map = load_map(config.map_path);
        const fs::path dir = prepare_out_dir(manifest);
        const OutputHeader header{"gridworld", kv.hash(), config.seed};

        const auto rows = run_gridworld_experiment(config, map, execution_of(manifest), manifest.jobs);
        {
            auto f = open_output(dir / "gridworld_results.csv");
            write_results_csv(f, header, rows, true);
        }
        {
            auto f = open_output(dir / "gridworld_summary.csv");
            write_summary_csv(f, header, rows, true);
        }
        {
            auto f = open_output(dir / "gridworld_episodes.csv");
            write_episode_summary_csv(f, header, rows);
        }
        const std::size_t n = config.variants.size();
        print_significance_matrix(out, significance_matrix(rows), 0.05, n * (n - 1) / 2);
        out << "wrote " << rows.size() << " runs to " << dir.string() << '\n';
        return 0;
    });
}

int cmd_oracle(const std::string& map_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const GridMap map = load_map(map_path);
        const QTable q = optimal_q(map);
        const std::string policy = render_policy(map, q);
        {
            const fs::path path(out_path);
            if (path.has_parent_path()) {
                fs::create_directories(path.parent_path());
            }
            auto f = open_output(path);
            q.save_csv(f);
        }
        {
            auto f = open_output(out_path + ".policy.txt");
            f << policy;
        }
        out << policy;
        return 0;
    });
}

int cmd_map_check(const std::string& map_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const GridMap map = load_map(map_path);
        out << map.render_ascii();
        out << map.width() << "x" << map.height() << ", goal " << to_string(map.goal()) << ", "
            << map.start_pool().size() << " start cells\n";
        return 0;
    });
}

}  // namespace mtirl::cli
