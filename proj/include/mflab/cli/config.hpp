#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "mflab/core/format.hpp"
#include "mflab/core/states.hpp"
#include "mflab/ensemble.hpp"

namespace mflab::cli {

/// A parsed experiment configuration: the validated plan plus the run-level
/// settings that are not part of the physics.
struct ExperimentConfig {
    ExperimentPlan plan;
    std::string output_dir = "./out";
    unsigned threads = 0;
    /// Tail-diagnostic threshold; nullopt means half the observable norm.
    std::optional<double> beta;
    /// Every key with its resolved value, in documentation order.
    std::vector<std::pair<std::string, std::string>> resolved;

    std::string resolved_text() const {
        std::ostringstream os;
        for (const auto& [k, v] : resolved) os << k << ": " << v << '\n';
        return os.str();
    }
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "dimension",      "sites",          "box_length",         "t_final",
        "dt",             "particle_counts", "samples",           "base_seed",
        "threads",        "dimension_cap",  "field.base",         "field.gaussian_mean",
        "field.sigmas",   "field.enforce_even", "observable.kind", "observable.p",
        "observable.center", "observable.width", "init.kind",     "init.center",
        "init.width",     "init.momentum",  "init.mode",          "output_dir",
        "beta"};
    return keys;
}

inline void flatten(const YAML::Node& node, const std::string& prefix, std::map<std::string, YAML::Node>& out) {
    for (const auto& item : node) {
        const std::string key = prefix.empty() ? item.first.as<std::string>() : prefix + "." + item.first.as<std::string>();
        if (item.second.IsMap())
            flatten(item.second, key, out);
        else
            out[key] = item.second;
    }
}

class KeyReader {
public:
    explicit KeyReader(std::map<std::string, YAML::Node> values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& node = values_.at(key);
        if (node.IsSequence()) {
            std::string joined;
            for (std::size_t i = 0; i < node.size(); ++i) joined += (i ? "," : "") + node[i].as<std::string>();
            return joined;
        }
        if (node.IsNull()) return "";
        if (!node.IsScalar()) throw ConfigError("config key '" + key + "' must be a scalar");
        return node.as<std::string>();
    }

    template <typename T>
    T get(const std::string& key, T fallback) const {
        if (!has(key)) return fallback;
        return convert<T>(key, text(key, ""));
    }

    template <typename T>
    std::vector<T> list(const std::string& key, const std::string& fallback) const {
        const std::string raw = text(key, fallback);
        std::vector<T> out;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto first = item.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
            out.push_back(convert<T>(key, item));
        }
        return out;
    }

    template <typename T>
    static T convert(const std::string& key, const std::string& raw) {
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (raw == "true" || raw == "1" || raw == "yes") return true;
                if (raw == "false" || raw == "0" || raw == "no") return false;
                throw std::invalid_argument(raw);
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                if (raw.empty() || raw[0] == '-') throw std::invalid_argument(raw);
                std::size_t used = 0;
                const auto v = std::stoull(raw, &used, 0);
                if (used != raw.size()) throw std::invalid_argument(raw);
                return v;
            } else if constexpr (std::is_integral_v<T>) {
                std::size_t used = 0;
                const long long v = std::stoll(raw, &used);
                if (used != raw.size()) throw std::invalid_argument(raw);
                return static_cast<T>(v);
            } else {
                std::size_t used = 0;
                const double v = std::stod(raw, &used);
                if (used != raw.size() || !std::isfinite(v)) throw std::invalid_argument(raw);
                return v;
            }
        } catch (const std::logic_error&) {
            throw ConfigError("config key '" + key + "': cannot parse '" + raw + "'");
        }
    }

private:
    std::map<std::string, YAML::Node> values_;
};

inline std::string fmt(double v) { return format_shortest(v); }

template <typename T>
std::string join(const std::vector<T>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << (i ? "," : "");
        if constexpr (std::is_floating_point_v<T>)
            os << fmt(values[i]);
        else
            os << values[i];
    }
    return os.str();
}

}  // namespace detail

/// Builds and validates an experiment from a YAML document of flat keys
/// (nested maps are accepted and flattened to dotted keys).
inline ExperimentConfig parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    std::map<std::string, YAML::Node> flat;
    if (root.IsMap()) {
        detail::flatten(root, "", flat);
    } else if (!root.IsNull()) {
        throw ConfigError("config must be a map of key: value pairs");
    }
    const auto& keys = detail::known_keys();
    for (const auto& [key, unused] : flat)
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key '" + key + "'");

    const detail::KeyReader r(std::move(flat));
    std::vector<std::pair<std::string, std::string>> out;

    const int dimension = r.get<int>("dimension", 1);
    const int sites = r.get<int>("sites", 8);
    const double box_length = r.get<double>("box_length", 8.0);
    const LatticeGrid grid(dimension, sites, box_length);
    out.emplace_back("dimension", std::to_string(dimension));
    out.emplace_back("sites", std::to_string(sites));
    out.emplace_back("box_length", detail::fmt(box_length));

    const double t_final = r.get<double>("t_final", 0.5);
    const double dt = r.get<double>("dt", t_final > 0.0 ? t_final / 512.0 : 1.0 / 512.0);
    out.emplace_back("t_final", detail::fmt(t_final));
    out.emplace_back("dt", detail::fmt(dt));

    const auto counts = r.list<int>("particle_counts", "2,4,6");
    out.emplace_back("particle_counts", detail::join(counts));
    const int samples = r.get<int>("samples", 64);
    out.emplace_back("samples", std::to_string(samples));
    const auto base_seed = r.get<std::uint64_t>("base_seed", 1);
    out.emplace_back("base_seed", std::to_string(base_seed));
    const int threads = r.get<int>("threads", 0);
    if (threads < 0) throw ConfigError("config key 'threads' must be nonnegative (0 = all cores)");
    out.emplace_back("threads", std::to_string(threads));
    const auto cap = r.get<std::uint64_t>("dimension_cap", kDefaultDimensionCap);
    out.emplace_back("dimension_cap", std::to_string(cap));

    FieldSpec field;
    try {
        field.base = BaseProfile::parse(r.text("field.base", "gaussian_bump(1.0, 1.5)"));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config key 'field.base': ") + e.what());
    }
    field.gaussian_mean = r.get<double>("field.gaussian_mean", 0.0);
    field.mode_stddevs = r.list<double>("field.sigmas", "0.5,0.3,0.1");
    field.enforce_even = r.get<bool>("field.enforce_even", true);
    try {
        field.validate(grid);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config key 'field.sigmas': ") + e.what());
    }
    out.emplace_back("field.base", field.base.to_string());
    out.emplace_back("field.gaussian_mean", detail::fmt(field.gaussian_mean));
    out.emplace_back("field.sigmas", detail::join(field.mode_stddevs));
    out.emplace_back("field.enforce_even", field.enforce_even ? "true" : "false");

    const double mid = 0.5 * box_length;
    const std::string init_kind = r.text("init.kind", "gaussian_packet");
    WaveFunction phi;
    out.emplace_back("init.kind", init_kind);
    if (init_kind == "gaussian_packet") {
        const double center = r.get<double>("init.center", mid);
        const double width = r.get<double>("init.width", 1.0);
        const double momentum = r.get<double>("init.momentum", 0.0);
        if (!(width > 0.0)) throw ConfigError("config key 'init.width' must be positive");
        phi = gaussian_packet(grid, {center, center, center}, width, momentum);
        out.emplace_back("init.center", detail::fmt(center));
        out.emplace_back("init.width", detail::fmt(width));
        out.emplace_back("init.momentum", detail::fmt(momentum));
    } else if (init_kind == "uniform") {
        phi = uniform_state(grid);
    } else if (init_kind == "plane_wave") {
        const int mode = r.get<int>("init.mode", 1);
        phi = plane_wave(grid, mode);
        out.emplace_back("init.mode", std::to_string(mode));
    } else {
        throw ConfigError("config key 'init.kind': unknown value '" + init_kind +
                          "' (expected gaussian_packet, uniform or plane_wave)");
    }

    const std::string obs_kind = r.text("observable.kind", "condensate_projector");
    const int p = r.get<int>("observable.p", 1);
    if (p < 1 || p > 2) throw ConfigError("config key 'observable.p' must be 1 or 2");
    out.emplace_back("observable.kind", obs_kind);
    out.emplace_back("observable.p", std::to_string(p));
    std::optional<PObservable> observable;
    if (obs_kind == "condensate_projector") {
        observable = condensate_projector(phi, p);
    } else if (obs_kind == "site_multiplier") {
        const double center = r.get<double>("observable.center", mid);
        const double width = r.get<double>("observable.width", 1.0);
        if (!(width > 0.0)) throw ConfigError("config key 'observable.width' must be positive");
        RealVector profile(static_cast<Eigen::Index>(grid.num_sites()));
        for (std::size_t x = 0; x < grid.num_sites(); ++x)
            profile[static_cast<Eigen::Index>(x)] =
                std::exp(-grid.periodic_distance_squared(x, {center, center, center}) / (2.0 * width * width));
        observable = site_multiplier(grid, profile, p);
        out.emplace_back("observable.center", detail::fmt(center));
        out.emplace_back("observable.width", detail::fmt(width));
    } else {
        throw ConfigError("config key 'observable.kind': unknown value '" + obs_kind +
                          "' (expected condensate_projector or site_multiplier)");
    }

    const std::string output_dir = r.text("output_dir", "./out");
    out.emplace_back("output_dir", output_dir);
    std::optional<double> beta;
    if (r.has("beta")) {
        beta = r.get<double>("beta", 0.0);
        if (!(*beta > 0.0)) throw ConfigError("config key 'beta' must be positive");
        out.emplace_back("beta", detail::fmt(*beta));
    } else {
        out.emplace_back("beta", "auto");
    }

    ExperimentPlan plan{.grid = grid,
                              .field_spec = field,
                              .initial_state = phi,
                              .observable = *observable,
                              .t_final = t_final,
                              .dt = dt,
                              .particle_counts = counts,
                              .samples = samples,
                              .base_seed = base_seed,
                              .dimension_cap = static_cast<std::size_t>(cap),
                              .krylov = {}};
    try {
        plan.validate();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.find("particle_counts") != std::string::npos || msg.find("samples") != std::string::npos)
            throw;
        throw ConfigError("invalid configuration: " + msg);
    }
    return ExperimentConfig{std::move(plan), output_dir, static_cast<unsigned>(threads), beta, std::move(out)};
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Replaces the echoed value of `key` after a command-line override.
inline void override_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    for (auto& [k, v] : cfg.resolved)
        if (k == key) v = value;
}

}  // namespace mflab::cli
