#pragma once

#include "mtirl/experiments.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtirl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` text with `[section]` headers and `#` comments. Keys are
/// stored as "section.key".
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::string& path);

    [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
    [[nodiscard]] const std::string& raw(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
    [[nodiscard]] std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    /// Comma-separated list.
    [[nodiscard]] std::vector<std::string> get_list(const std::string& key) const;
    /// Comma-separated numbers; an item `lo:hi:step` expands to the inclusive
    /// grid lo, lo+step, ..., hi (rounded to 1e-6).
    [[nodiscard]] std::vector<double> get_double_list(const std::string& key) const;

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    /// Sorted `key=value` lines; hashing this ignores comments and layout.
    [[nodiscard]] std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    [[nodiscard]] std::string hash() const;

    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Directory of the loaded file ("" when parsed from text).
    std::string base_dir;

private:
    std::map<std::string, std::string> values_;
};

/// Reads the [aggregation] section over AggExpConfig defaults and validates.
AggExpConfig aggregation_config_from(const KeyValueConfig& kv);
/// Reads [gridworld] and [learner] over GridExpConfig defaults and validates.
/// A relative map path is resolved against the config file's directory.
GridExpConfig gridworld_config_from(const KeyValueConfig& kv);

/// Built-in preset text ("desk" or "full"); throws ConfigError otherwise.
std::string preset_text(std::string_view name);

}  // namespace mtirl
