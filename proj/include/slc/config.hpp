#pragma once

// Flat key-value experiment configuration. Format: one `key = value` per
// line, '#' starts a comment, blank lines ignored. Unknown keys are errors
// (typos must not silently fall back to defaults). The resolved
// configuration can be echoed back to text that parses to the same values.
//
// Keys:
//   model            single_charge_excited | single_charge_superposition |
//                    coupled_charge | coupled_phase
//   theta            fluctuation bound for every tie group, in [0, 1)
//   theta.<group>    per-group override
//   nf               training grid nodes per tie group (odd unless allow_even_nf)
//   nf.<group>       per-group override
//   test_distribution model_default | uniform | truncated_gaussian
//   n_test           Monte-Carlo test sample count
//   seed_train       recorded into the field file (training itself is
//                    deterministic: grid ensemble, fixed initial field)
//   seed_test        seeds the test draws
//   threads          worker count; 0 = hardware concurrency
//   out              output directory
//   eta0             initial ascent rate; 0 = auto (first step moves <= 1%
//                    of each channel range)
//   epsilon, window  convergence: |J[i] - J[i-window]| < epsilon
//   max_iterations   ascent step cap
//   shrink_factor, grow_factor   step-rate adaptation
//   allow_even_nf    permit even grid sizes
//   dump_samples     also write per-sample fidelity CSVs
//   bounds           comma list for sweep-bound, strictly increasing
//   nf_list          comma list for sweep-nf, strictly increasing

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "slc/io.hpp"
#include "slc/model.hpp"
#include "slc/optimizer.hpp"
#include "slc/sampling.hpp"

namespace slc {

// Bad key, bad value, or inconsistent combination (CLI exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string model;
    double theta = 0.25;
    std::map<std::string, double> theta_group;
    int nf = 5;
    std::map<std::string, int> nf_group;
    TestDistribution test_distribution = TestDistribution::model_default;
    int n_test = 5000;
    std::uint64_t seed_train = 1;
    std::uint64_t seed_test = 1;
    int threads = 0;
    std::string out = ".";
    double eta0 = 0.0;
    double epsilon = 1e-4;
    int window = 100;
    int max_iterations = 20000;
    double shrink_factor = 0.5;
    double grow_factor = 1.1;
    bool allow_even_nf = false;
    bool dump_samples = false;
    std::vector<double> bounds = {0.05, 0.10, 0.15, 0.20, 0.25};
    std::vector<int> nf_list = {1, 3, 5, 7, 9, 11};
};

namespace detail {

inline double config_double(const std::string& key, const std::string& v) {
    try {
        return parse_double_text(v, key);
    } catch (const IoError& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline long long config_int(const std::string& key, const std::string& v) {
    try {
        return parse_int_text(v, key);
    } catch (const IoError& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline std::uint64_t config_uint64(const std::string& key, const std::string& v) {
    try {
        return parse_uint64_text(v, key);
    } catch (const IoError& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline bool config_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

inline double config_theta(const std::string& key, const std::string& v) {
    const double th = config_double(key, v);
    if (!(th >= 0.0 && th < 1.0))
        throw ConfigError("config key '" + key + "': bound must be in [0, 1)");
    return th;
}

inline int config_count(const std::string& key, const std::string& v, long long max = 1000000) {
    const long long n = config_int(key, v);
    if (n < 1 || n > max)
        throw ConfigError("config key '" + key + "': must be a positive integer <= " +
                          std::to_string(max));
    return static_cast<int>(n);
}

}  // namespace detail

// Assigns one key; the single entry point shared by the config file parser
// and the CLI/env override paths so every source is validated identically.
inline void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "model") {
        try {
            model_kind_from_id(value);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config key 'model': ") + e.what());
        }
        cfg.model = value;
    } else if (key == "theta") {
        cfg.theta = detail::config_theta(key, value);
    } else if (key.rfind("theta.", 0) == 0) {
        const std::string group = key.substr(6);
        if (group.empty()) throw ConfigError("config key '" + key + "': empty group name");
        cfg.theta_group[group] = detail::config_theta(key, value);
    } else if (key == "nf") {
        cfg.nf = detail::config_count(key, value, 10001);
    } else if (key.rfind("nf.", 0) == 0) {
        const std::string group = key.substr(3);
        if (group.empty()) throw ConfigError("config key '" + key + "': empty group name");
        cfg.nf_group[group] = detail::config_count(key, value, 10001);
    } else if (key == "test_distribution") {
        try {
            cfg.test_distribution = test_distribution_from_string(value);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config key 'test_distribution': ") + e.what());
        }
    } else if (key == "n_test") {
        cfg.n_test = detail::config_count(key, value, 100000000);
    } else if (key == "seed_train") {
        cfg.seed_train = detail::config_uint64(key, value);
    } else if (key == "seed_test") {
        cfg.seed_test = detail::config_uint64(key, value);
    } else if (key == "threads") {
        const long long t = detail::config_int(key, value);
        if (t < 0 || t > 4096) throw ConfigError("config key 'threads': must be in [0, 4096]");
        cfg.threads = static_cast<int>(t);
    } else if (key == "out") {
        if (value.empty()) throw ConfigError("config key 'out': empty path");
        cfg.out = value;
    } else if (key == "eta0") {
        cfg.eta0 = detail::config_double(key, value);
        if (!(cfg.eta0 >= 0.0)) throw ConfigError("config key 'eta0': must be >= 0");
    } else if (key == "epsilon") {
        cfg.epsilon = detail::config_double(key, value);
        if (!(cfg.epsilon > 0.0)) throw ConfigError("config key 'epsilon': must be > 0");
    } else if (key == "window") {
        cfg.window = detail::config_count(key, value);
    } else if (key == "max_iterations") {
        cfg.max_iterations = detail::config_count(key, value, 100000000);
    } else if (key == "shrink_factor") {
        cfg.shrink_factor = detail::config_double(key, value);
        if (!(cfg.shrink_factor > 0.0 && cfg.shrink_factor < 1.0))
            throw ConfigError("config key 'shrink_factor': must be in (0, 1)");
    } else if (key == "grow_factor") {
        cfg.grow_factor = detail::config_double(key, value);
        if (!(cfg.grow_factor > 1.0)) throw ConfigError("config key 'grow_factor': must be > 1");
    } else if (key == "allow_even_nf") {
        cfg.allow_even_nf = detail::config_bool(key, value);
    } else if (key == "dump_samples") {
        cfg.dump_samples = detail::config_bool(key, value);
    } else if (key == "bounds") {
        std::vector<double> bs;
        for (const auto& piece : split(value, ','))
            bs.push_back(detail::config_theta(key, trim(piece)));
        if (bs.empty()) throw ConfigError("config key 'bounds': empty list");
        for (std::size_t i = 1; i < bs.size(); ++i)
            if (!(bs[i] > bs[i - 1]))
                throw ConfigError("config key 'bounds': values must be strictly increasing");
        cfg.bounds = std::move(bs);
    } else if (key == "nf_list") {
        std::vector<int> ns;
        for (const auto& piece : split(value, ','))
            ns.push_back(detail::config_count(key, trim(piece), 10001));
        if (ns.empty()) throw ConfigError("config key 'nf_list': empty list");
        for (std::size_t i = 1; i < ns.size(); ++i)
            if (ns[i] <= ns[i - 1])
                throw ConfigError("config key 'nf_list': values must be strictly increasing");
        cfg.nf_list = std::move(ns);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

inline RunConfig parse_config_text(const std::string& text, RunConfig base = RunConfig{}) {
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string ln = lines[i];
        const std::size_t hash = ln.find('#');
        if (hash != std::string::npos) ln = ln.substr(0, hash);
        ln = trim(ln);
        if (ln.empty()) continue;
        const std::size_t eq = ln.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(i + 1) +
                              ": expected 'key = value', got '" + ln + "'");
        const std::string key = trim(ln.substr(0, eq));
        const std::string value = trim(ln.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(i + 1) + ": empty key");
        try {
            apply_config_key(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = RunConfig{}) {
    return parse_config_text(read_text_file(path), std::move(base));
}

// Canonical echo of the fully resolved configuration; parsing it back yields
// a bit-identical RunConfig.
inline std::string resolved_config_text(const RunConfig& cfg) {
    std::string s;
    s += "# resolved configuration\n";
    if (!cfg.model.empty()) s += "model = " + cfg.model + "\n";
    s += "theta = " + format_double(cfg.theta) + "\n";
    for (const auto& [g, v] : cfg.theta_group) s += "theta." + g + " = " + format_double(v) + "\n";
    s += "nf = " + std::to_string(cfg.nf) + "\n";
    for (const auto& [g, v] : cfg.nf_group) s += "nf." + g + " = " + std::to_string(v) + "\n";
    s += "test_distribution = " + std::string(to_string(cfg.test_distribution)) + "\n";
    s += "n_test = " + std::to_string(cfg.n_test) + "\n";
    s += "seed_train = " + std::to_string(cfg.seed_train) + "\n";
    s += "seed_test = " + std::to_string(cfg.seed_test) + "\n";
    s += "threads = " + std::to_string(cfg.threads) + "\n";
    s += "out = " + cfg.out + "\n";
    s += "eta0 = " + format_double(cfg.eta0) + "\n";
    s += "epsilon = " + format_double(cfg.epsilon) + "\n";
    s += "window = " + std::to_string(cfg.window) + "\n";
    s += "max_iterations = " + std::to_string(cfg.max_iterations) + "\n";
    s += "shrink_factor = " + format_double(cfg.shrink_factor) + "\n";
    s += "grow_factor = " + format_double(cfg.grow_factor) + "\n";
    s += "allow_even_nf = " + std::string(cfg.allow_even_nf ? "true" : "false") + "\n";
    s += "dump_samples = " + std::string(cfg.dump_samples ? "true" : "false") + "\n";
    {
        std::vector<std::string> parts;
        for (double b : cfg.bounds) parts.push_back(format_double(b));
        s += "bounds = " + join(parts, ',') + "\n";
    }
    {
        std::vector<std::string> parts;
        for (int n : cfg.nf_list) parts.push_back(std::to_string(n));
        s += "nf_list = " + join(parts, ',') + "\n";
    }
    return s;
}

// Model with the configured per-group fluctuation bounds applied.
inline QubitModel configured_model(const RunConfig& cfg) {
    if (cfg.model.empty()) throw ConfigError("config key 'model' is required for this command");
    QubitModel m = make_model(model_kind_from_id(cfg.model));
    m.set_bound_all(cfg.theta);
    for (const auto& [g, th] : cfg.theta_group) {
        try {
            m.set_bound(g, th);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config key 'theta.") + g + "': " + e.what());
        }
    }
    return m;
}

namespace detail {

inline void check_grid_size_allowed(const RunConfig& cfg, const std::string& key, int n) {
    if (n % 2 == 0 && !cfg.allow_even_nf)
        throw ConfigError("config key '" + key + "': even grid size " + std::to_string(n) +
                          " skips the nominal value; set allow_even_nf = true to permit it");
}

}  // namespace detail

// Per-tie-group training grid sizes in group order, honoring nf.<group>
// overrides and the odd-size rule.
inline std::vector<int> configured_grid_sizes(const RunConfig& cfg, const QubitModel& m) {
    const auto groups = m.groups();
    for (const auto& [g, n] : cfg.nf_group) {
        bool known = false;
        for (const auto& name : groups) known = known || name == g;
        if (!known) throw ConfigError("config key 'nf." + g + "': model has no tie group '" + g + "'");
    }
    detail::check_grid_size_allowed(cfg, "nf", cfg.nf);
    std::vector<int> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        const auto it = cfg.nf_group.find(g);
        const int n = it == cfg.nf_group.end() ? cfg.nf : it->second;
        if (it != cfg.nf_group.end()) detail::check_grid_size_allowed(cfg, "nf." + g, n);
        out.push_back(n);
    }
    return out;
}

inline OptimizationConfig optimizer_config(const RunConfig& cfg, int resolved_threads) {
    OptimizationConfig oc;
    oc.initial_step = cfg.eta0;
    oc.shrink_factor = cfg.shrink_factor;
    oc.grow_factor = cfg.grow_factor;
    oc.epsilon = cfg.epsilon;
    oc.window = cfg.window;
    oc.max_iterations = cfg.max_iterations;
    oc.threads = resolved_threads;
    return oc;
}

}  // namespace slc
