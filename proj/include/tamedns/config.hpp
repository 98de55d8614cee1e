#pragma once

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tamedns/analysis.hpp"
#include "tamedns/forcing.hpp"
#include "tamedns/grid.hpp"
#include "tamedns/integrator.hpp"
#include "tamedns/scenarios.hpp"

namespace tamedns {

// Full experiment configuration. File format: `key = value` lines, `#`
// comments, blank lines ignored; unknown keys are errors. CLI `--set
// key=value` overrides are applied after the file with the same key set.
struct SimConfig {
    int grid_size = 32;           // grid.size
    double nu = 1.0;              // physics.nu
    bool taming_enabled = true;   // taming.enabled
    double taming_n = 1.0;        // taming.N

    double t_end = 1.0;           // time.t_end
    double cfl = 0.5;             // time.cfl
    double dt_max = 1e-2;         // time.dt_max
    double dt_min = 1e-9;         // time.dt_min
    double sample_interval = 1e-2;  // time.sample_interval

    Scenario scenario;            // scenario.name/.amplitude/.k0/.seed
    Forcing forcing;              // forcing.kind/.amplitude/.mode/.omega

    std::string output_dir = "out";  // output.dir
    int checkpoint_stride = 0;       // output.checkpoint_stride (samples; 0 = off)
    bool store_fields = false;       // output.store_fields

    std::string experiment = "run";  // experiment.kind
    std::vector<double> n_values = {1.0, 2.0, 4.0, 8.0, 16.0};  // experiment.n_values
    std::vector<int> m_values = {16, 32, 64};                   // experiment.m_values
    Region region;                   // experiment.region ("full" or 6 bounds)

    GridSpec grid() const { return GridSpec(grid_size); }
    StepPolicy step_policy() const { return StepPolicy{cfl, dt_max, dt_min}; }
    TamingProfile profile() const { return TamingProfile(nu, taming_n, taming_enabled); }

    void validate() const {
        grid().validate();
        if (nu <= 0.0) throw ConfigError("physics.nu must be positive");
        if (taming_n < 0.0) throw ConfigError("taming.N must be >= 0");
        if (t_end < 0.0) throw ConfigError("time.t_end must be >= 0");
        if (!(sample_interval > 0.0))
            throw ConfigError("time.sample_interval must be positive");
        step_policy().validate();
        scenario.validate();
        forcing.validate(grid());
        region.validate();
        if (experiment != "run" && experiment != "sweep_taming" &&
            experiment != "sweep_resolution" && experiment != "compare")
            throw ConfigError("experiment.kind must be one of "
                              "run|sweep_taming|sweep_resolution|compare, got '" +
                              experiment + "'");
        if (checkpoint_stride < 0)
            throw ConfigError("output.checkpoint_stride must be >= 0");
        if (experiment == "sweep_taming") {
            if (n_values.empty())
                throw ConfigError("experiment.n_values must not be empty");
            for (size_t i = 0; i < n_values.size(); ++i) {
                if (n_values[i] < 0.0)
                    throw ConfigError("experiment.n_values entries must be >= 0");
                if (i > 0 && !(n_values[i] > n_values[i - 1]))
                    throw ConfigError("experiment.n_values must be strictly increasing");
            }
        }
        if (experiment == "sweep_resolution") {
            if (m_values.size() < 2)
                throw ConfigError("experiment.m_values needs at least 2 sizes");
            for (size_t i = 0; i < m_values.size(); ++i) {
                GridSpec(m_values[i]).validate();
                if (i > 0 && !(m_values[i] > m_values[i - 1]))
                    throw ConfigError("experiment.m_values must be strictly increasing");
            }
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    }
}

inline long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(v);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    return out;
}

}  // namespace detail

// applies one `key = value` assignment
inline void apply_setting(SimConfig& cfg, const std::string& key,
                          const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    const std::string v = detail::trim(value);
    if (key == "grid.size") cfg.grid_size = static_cast<int>(parse_int(key, v));
    else if (key == "physics.nu") cfg.nu = parse_double(key, v);
    else if (key == "taming.enabled") cfg.taming_enabled = parse_bool(key, v);
    else if (key == "taming.N") cfg.taming_n = parse_double(key, v);
    else if (key == "time.t_end") cfg.t_end = parse_double(key, v);
    else if (key == "time.cfl") cfg.cfl = parse_double(key, v);
    else if (key == "time.dt_max") cfg.dt_max = parse_double(key, v);
    else if (key == "time.dt_min") cfg.dt_min = parse_double(key, v);
    else if (key == "time.sample_interval") cfg.sample_interval = parse_double(key, v);
    else if (key == "scenario.name") cfg.scenario.name = v;
    else if (key == "scenario.amplitude") cfg.scenario.amplitude = parse_double(key, v);
    else if (key == "scenario.k0") cfg.scenario.k0 = parse_double(key, v);
    else if (key == "scenario.seed")
        cfg.scenario.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "forcing.kind") cfg.forcing.kind = v;
    else if (key == "forcing.amplitude") cfg.forcing.amplitude = parse_double(key, v);
    else if (key == "forcing.mode") cfg.forcing.mode = static_cast<int>(parse_int(key, v));
    else if (key == "forcing.omega") cfg.forcing.omega = parse_double(key, v);
    else if (key == "output.dir") cfg.output_dir = v;
    else if (key == "output.checkpoint_stride")
        cfg.checkpoint_stride = static_cast<int>(parse_int(key, v));
    else if (key == "output.store_fields") cfg.store_fields = parse_bool(key, v);
    else if (key == "experiment.kind") cfg.experiment = v;
    else if (key == "experiment.n_values") {
        cfg.n_values.clear();
        for (const auto& item : detail::split_list(v))
            cfg.n_values.push_back(parse_double(key, item));
    } else if (key == "experiment.m_values") {
        cfg.m_values.clear();
        for (const auto& item : detail::split_list(v))
            cfg.m_values.push_back(static_cast<int>(parse_int(key, item)));
    } else if (key == "experiment.region") {
        if (v == "full") {
            cfg.region = Region{};
        } else {
            const auto items = detail::split_list(v);
            if (items.size() != 6)
                throw ConfigError("experiment.region must be 'full' or six numbers");
            for (int i = 0; i < 6; ++i)
                cfg.region.bounds[i] = parse_double(key, items[i]);
        }
    } else {
        throw ConfigError("unknown configuration key: '" + key + "'");
    }
}

inline SimConfig parse_config_stream(std::istream& in, const std::string& origin) {
    SimConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        apply_setting(cfg, key, value);
    }
    return cfg;
}

// Reads a config file; an empty path yields all defaults. Overrides are
// `key=value` strings applied in order after the file.
inline SimConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides = {}) {
    SimConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        cfg = parse_config_stream(in, path);
    }
    for (const auto& ov : overrides) {
        const size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be key=value, got '" + ov + "'");
        apply_setting(cfg, detail::trim(ov.substr(0, eq)),
                      detail::trim(ov.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

}  // namespace tamedns
