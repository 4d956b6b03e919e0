#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "../dynamics.hpp"
#include "../errors.hpp"

namespace comblab::experiments {

struct ExperimentConfig {
    double r = 0.4;
    std::uint64_t seed = 0;
    int samples = 10000;
    int iters = 200;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double geom_tol = 1e-9;
    double match_tol = 1e-12;
    double escape_radius = 10.0;
    double converge_radius = 1e-6;
    double separation_constant = 0.1;
    std::string out_dir = "out";

    /// Throws ConfigError naming the first offending field.
    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) {
                throw ConfigError(std::string("config: ") + name + " must be positive");
            }
        };
        if (!(r > 0.0 && r < 0.5)) {
            throw ConfigError("config: r must lie in (0, 1/2)");
        }
        if (samples < 1) {
            throw ConfigError("config: samples must be >= 1");
        }
        if (iters < 1) {
            throw ConfigError("config: iters must be >= 1");
        }
        positive(abs_tol, "abs_tol");
        positive(rel_tol, "rel_tol");
        positive(geom_tol, "geom_tol");
        positive(match_tol, "match_tol");
        positive(escape_radius, "escape_radius");
        positive(converge_radius, "converge_radius");
        positive(separation_constant, "separation_constant");
        if (out_dir.empty()) {
            throw ConfigError("config: out_dir must not be empty");
        }
        // The component constructors enforce the remaining bounds.
        try {
            model();
            probe();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    Model model() const
    {
        Model m{CombParams(r, match_tol, geom_tol), FlowConfig{}, BumpProfile{}, true};
        m.flow.abs_tol = abs_tol;
        m.flow.rel_tol = rel_tol;
        m.flow.validate();
        return m;
    }

    ProbeParams probe() const
    {
        ProbeParams p{iters, escape_radius, converge_radius, separation_constant};
        p.validate();
        return p;
    }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c)
{
    j = nlohmann::json{{"r", c.r},
                       {"seed", c.seed},
                       {"samples", c.samples},
                       {"iters", c.iters},
                       {"abs_tol", c.abs_tol},
                       {"rel_tol", c.rel_tol},
                       {"geom_tol", c.geom_tol},
                       {"match_tol", c.match_tol},
                       {"escape_radius", c.escape_radius},
                       {"converge_radius", c.converge_radius},
                       {"separation_constant", c.separation_constant},
                       {"out_dir", c.out_dir}};
}

/// Missing keys keep their current value; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, ExperimentConfig& c)
{
    if (!j.is_object()) {
        throw ConfigError("config: top level must be a JSON object");
    }
    const nlohmann::json known = c;
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) {
                j.at(key).get_to(field);
            }
        };
        get("r", c.r);
        get("seed", c.seed);
        get("samples", c.samples);
        get("iters", c.iters);
        get("abs_tol", c.abs_tol);
        get("rel_tol", c.rel_tol);
        get("geom_tol", c.geom_tol);
        get("match_tol", c.match_tol);
        get("escape_radius", c.escape_radius);
        get("converge_radius", c.converge_radius);
        get("separation_constant", c.separation_constant);
        get("out_dir", c.out_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {})
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    from_json(j, base);
    return base;
}

} // namespace comblab::experiments
