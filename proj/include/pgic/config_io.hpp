#pragma once

// JSON configuration loading. The config is a flat object; absent keys take
// the defaults (sigma2=1, P=Q=50, a1=b1=0.1, a2=b2=10, uniform probs,
// tau=1e-5, max_outer=100, caps_mode="paper", weighted_gradients=true).

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pgic/model.hpp"

namespace pgic {

/// The config file could not be read (missing, unreadable).
struct ConfigIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The config content is malformed or holds out-of-range values.
struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline SolverConfig parse_config_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigParseError("config must be a JSON object");

    SolverConfig cfg;
    const auto number = [&](const char* key, double& into) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number())
            throw ConfigParseError(std::string("config key '") + key + "' must be a number");
        into = j.at(key).get<double>();
    };
    number("sigma2", cfg.sigma2);
    number("P", cfg.tx1_budget);
    number("Q", cfg.tx2_budget);
    number("a1", cfg.gains.a1);
    number("b1", cfg.gains.b1);
    number("a2", cfg.gains.a2);
    number("b2", cfg.gains.b2);
    number("tau", cfg.tolerance);

    if (j.contains("max_outer")) {
        if (!j.at("max_outer").is_number_integer())
            throw ConfigParseError("config key 'max_outer' must be an integer");
        cfg.max_outer = j.at("max_outer").get<int>();
    }
    if (j.contains("caps_mode")) {
        const std::string mode = j.at("caps_mode").is_string() ? j.at("caps_mode").get<std::string>() : "";
        if (mode == "paper") cfg.caps_mode = CapsMode::paper;
        else if (mode == "symmetric") cfg.caps_mode = CapsMode::symmetric;
        else throw ConfigParseError("config key 'caps_mode' must be \"paper\" or \"symmetric\"");
    }
    if (j.contains("weighted_gradients")) {
        if (!j.at("weighted_gradients").is_boolean())
            throw ConfigParseError("config key 'weighted_gradients' must be a boolean");
        cfg.weighted_gradients = j.at("weighted_gradients").get<bool>();
    }
    if (j.contains("probs")) {
        const auto& arr = j.at("probs");
        if (!arr.is_array() || arr.size() != 4)
            throw ConfigParseError("config key 'probs' must be an array of 4 probabilities");
        double sum = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            if (!arr[k].is_number())
                throw ConfigParseError("config key 'probs' must hold numbers");
            cfg.probs.p[k] = arr[k].get<double>();
            if (!(cfg.probs.p[k] >= 0.0 && cfg.probs.p[k] <= 1.0))
                throw ConfigParseError("config key 'probs': each entry must lie in [0, 1]");
            sum += cfg.probs.p[k];
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigParseError("config key 'probs' must sum to 1 (within 1e-9)");
        for (double& p : cfg.probs.p) p /= sum;  // renormalize residual rounding
    }

    static const char* known[] = {"sigma2", "P", "Q", "a1", "b1", "a2", "b2", "probs",
                                  "tau", "max_outer", "caps_mode", "weighted_gradients"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigParseError("unknown config key '" + it.key() + "'");
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigParseError(std::string("config invalid: ") + e.what());
    }
    return cfg;
}

/// Loads and validates a flat JSON config file.
inline SolverConfig parse_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigIoError("cannot read config file: " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigParseError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_config_json(j);
}

}  // namespace pgic
