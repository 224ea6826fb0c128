#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace lqem {

/// Key-value configuration: INI sections with '#'/';' comments, addressed as
/// "section.key". Parse errors and type errors always carry the key path.
/// Environment variables LQEM_<SECTION>_<KEY> override file values.
class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_string(const std::string& text, const std::string& origin = "<string>");

    void apply_env_overrides(const char* prefix = "LQEM_");
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Throws if any key was never read (catches typos and unknown keys).
    void reject_unused() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> used_;
    std::string origin_;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

/// Common run options shared by every mode.
struct RunConfig {
    std::string mode;
    double q = 1.5;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool checks_enabled = true;
    std::int64_t threads = 1;
    ConfigMap raw;
};

/// Loads a config file and extracts the [run] section. `mode` may be empty in
/// the file if supplied by the CLI subcommand.
RunConfig load_run_config(const std::string& path);

} // namespace lqem
