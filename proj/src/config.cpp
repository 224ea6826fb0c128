#include "lqem/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace lqem {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str(), path);
}

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& origin) {
    ConfigMap cfg;
    cfg.origin_ = origin;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": malformed section header '" + line + "'");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key = value, got '" + line + "'");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        const std::string path = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(path))
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                     path + "'");
        cfg.entries_[path] = value;
    }
    return cfg;
}

void ConfigMap::apply_env_overrides(const char* prefix) {
    const std::string pre(prefix);
    for (char** env = environ; env && *env; ++env) {
        const std::string kv(*env);
        if (kv.rfind(pre, 0) != 0) continue;
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string name = kv.substr(pre.size(), eq - pre.size());
        const std::string value = kv.substr(eq + 1);
        const std::size_t us = name.find('_');
        if (us == std::string::npos || us == 0 || us + 1 >= name.size()) continue;
        const std::string key = lower(name.substr(0, us)) + "." + lower(name.substr(us + 1));
        entries_[key] = value;
    }
}

void ConfigMap::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool ConfigMap::has(const std::string& key) const {
    used_.insert(key);
    return entries_.count(key) > 0;
}

void ConfigMap::fail(const std::string& key, const std::string& what) const {
    throw std::runtime_error("config " + origin_ + ": key '" + key + "' " + what);
}

std::string ConfigMap::get_string(const std::string& key) const {
    used_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, "is required but missing");
    return it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail(key, "is not a number: '" + v + "'");
    }
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return get_double(key);
}

std::int64_t ConfigMap::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail(key, "is not an integer: '" + v + "'");
    }
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    return get_int(key);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = lower(get_string(key));
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    fail(key, "is not a boolean (on/off): '" + v + "'");
}

void ConfigMap::reject_unused() const {
    for (const auto& [key, value] : entries_)
        if (!used_.count(key)) fail(key, "is not a recognized option");
}

RunConfig load_run_config(const std::string& path) {
    RunConfig rc;
    rc.raw = ConfigMap::parse_file(path);
    rc.raw.apply_env_overrides();
    rc.mode = rc.raw.get_string("run.mode", "");
    rc.q = rc.raw.get_double("run.q", 1.5);
    rc.seed = static_cast<std::uint64_t>(rc.raw.get_int("run.seed", 0));
    rc.out_dir = rc.raw.get_string("run.out", "out");
    rc.checks_enabled = rc.raw.get_bool("run.check", true);
    rc.threads = rc.raw.get_int("run.threads", 1);
    if (rc.threads < 1) throw std::runtime_error("config: run.threads must be >= 1");
    return rc;
}

} // namespace lqem
