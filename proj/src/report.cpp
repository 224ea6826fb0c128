#include "lqem/report.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace lqem {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::runtime_error("report: unknown key '" + where + it.key() + "'");
}

json entry_to_json(const CheckEntry& e) {
    return json{{"name", e.name}, {"value", e.value}, {"tolerance", e.tolerance}, {"pass", e.pass}};
}

CheckEntry entry_from_json(const json& j, const std::string& where) {
    reject_unknown(j, {"name", "value", "tolerance", "pass"}, where);
    CheckEntry e;
    e.name = j.at("name").get<std::string>();
    e.value = j.at("value").get<double>();
    e.tolerance = j.at("tolerance").get<double>();
    e.pass = j.at("pass").get<bool>();
    return e;
}

} // namespace

bool SolveReport::all_passed() const {
    for (const CheckEntry& e : residuals)
        if (!e.pass) return false;
    for (const CheckEntry& e : checks)
        if (!e.pass) return false;
    return true;
}

void SolveReport::add_residual(const std::string& name, double value, double tolerance) {
    residuals.push_back({name, value, tolerance, std::abs(value) <= tolerance});
}

void SolveReport::add_check(const std::string& name, double value, double tolerance, bool pass) {
    checks.push_back({name, value, tolerance, pass});
}

void SolveReport::add_check(const std::string& name, double value, double tolerance) {
    checks.push_back({name, value, tolerance, std::abs(value) <= tolerance});
}

json SolveReport::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["mode"] = mode;
    j["seed"] = seed;
    j["config_echo"] = config_echo;
    j["energies"] = json{{"initial", initial_energy}, {"final", final_energy}};
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["residuals"] = json::array();
    for (const CheckEntry& e : residuals) j["residuals"].push_back(entry_to_json(e));
    j["checks"] = json::array();
    for (const CheckEntry& e : checks) j["checks"].push_back(entry_to_json(e));
    j["outputs"] = outputs;
    j["timing"] = json{{"wall_seconds", wall_seconds}, {"timestamp", timestamp}};
    return j;
}

SolveReport SolveReport::from_json(const json& j) {
    reject_unknown(j,
                   {"schema_version", "mode", "seed", "config_echo", "energies", "iterations",
                    "converged", "residuals", "checks", "outputs", "timing"},
                   "");
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
        throw std::runtime_error("report: unsupported schema_version " + std::to_string(version));
    SolveReport r;
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_echo = j.at("config_echo").get<std::map<std::string, std::string>>();
    reject_unknown(j.at("energies"), {"initial", "final"}, "energies.");
    r.initial_energy = j.at("energies").at("initial").get<double>();
    r.final_energy = j.at("energies").at("final").get<double>();
    r.iterations = j.at("iterations").get<std::uint64_t>();
    r.converged = j.at("converged").get<bool>();
    for (const json& e : j.at("residuals")) r.residuals.push_back(entry_from_json(e, "residuals."));
    for (const json& e : j.at("checks")) r.checks.push_back(entry_from_json(e, "checks."));
    r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    reject_unknown(j.at("timing"), {"wall_seconds", "timestamp"}, "timing.");
    r.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
    r.timestamp = j.at("timing").at("timestamp").get<std::string>();
    return r;
}

void SolveReport::write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write report: " + path);
    os << to_json().dump(2) << '\n';
}

SolveReport SolveReport::read(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read report: " + path);
    json j;
    is >> j;
    return from_json(j);
}

std::string SolveReport::stable_dump() const {
    json j = to_json();
    j.erase("timing");
    return j.dump(2);
}

} // namespace lqem
