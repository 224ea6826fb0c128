#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace lqem {

/// One residual or invariant check: every recorded check names its tolerance.
struct CheckEntry {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Run summary serialized as versioned JSON. Deterministic given config and
/// seed: the volatile clock data lives in the separate "timing" object.
struct SolveReport {
    static constexpr int kSchemaVersion = 1;

    std::string mode;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config_echo;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::uint64_t iterations = 0;
    bool converged = true;
    std::vector<CheckEntry> residuals;
    std::vector<CheckEntry> checks;
    std::map<std::string, std::string> outputs;
    double wall_seconds = 0.0;
    std::string timestamp;

    bool all_passed() const;
    void add_residual(const std::string& name, double value, double tolerance);
    void add_check(const std::string& name, double value, double tolerance, bool pass);
    void add_check(const std::string& name, double value, double tolerance);

    nlohmann::json to_json() const;
    /// Strict parse: schema_version must equal 1; unknown keys are rejected.
    static SolveReport from_json(const nlohmann::json& j);

    void write(const std::string& path) const;
    static SolveReport read(const std::string& path);
    /// Serialization with the timing object removed (determinism comparisons).
    std::string stable_dump() const;
};

} // namespace lqem
