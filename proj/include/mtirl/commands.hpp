#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace mtirl::cli {

/// Where an experiment command reads its config from and writes to.
struct RunManifest {
    std::string config_path;  // empty: use `preset`
    std::string preset;       // "desk" or "full" when no config file is given
    std::string out_dir;      // empty: $MTIRL_OUT_DIR, then "results"
    std::optional<std::uint64_t> seed;
    int jobs = 0;  // 0: OpenMP default
    bool serial = false;
    bool dump_populations = false;
};

/// Output directory after applying the MTIRL_OUT_DIR fallback.
std::string resolve_out_dir(const std::string& requested);

/// Each command returns a process exit code and reports errors on `err`.
int cmd_aggregate(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_gridworld(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_oracle(const std::string& map_path, const std::string& out_path, std::ostream& out, std::ostream& err);
int cmd_map_check(const std::string& map_path, std::ostream& out, std::ostream& err);

}  // namespace mtirl::cli
