#pragma once
#include <optional>
#include <string>

#include <json.hpp>

#include "hillres/contour.hpp"
#include "hillres/potentials.hpp"

namespace hillres {

struct RunConfig {
    PeriodicPotential p;
    CompactPotential q;
    int N = 10;
    double z_max = 20.0;
    double r_max = 0.0;  // resonance radius; 0 skips the complex search
    std::optional<Rect> region;
    Settings settings;
    std::string out = ".";
    int verify_from = 1, verify_to = 10;
    double count_r = 0.0;
    int count_points = 40;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

// KEY=VALUE override of one tolerance; ConfigError for unknown keys
void apply_tolerance(Settings& s, const std::string& key, double value);
Rect parse_region(const std::string& text);

}  // namespace hillres
