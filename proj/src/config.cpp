#include "hillres/config.hpp"

#include <fstream>
#include <sstream>

#include "hillres/errors.hpp"

namespace hillres {

using nlohmann::json;

namespace {

const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    if (!j.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing required key");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

PeriodicPotential parse_p(const json& j) {
    if (!j.is_object()) throw ConfigError("p", "expected an object");
    if (j.contains("samples")) return PeriodicPotential::from_samples(numbers(j["samples"], "p.samples"));
    PeriodicPotential p;
    if (j.contains("mean")) p.mean = number(j["mean"], "p.mean");
    if (j.contains("cos")) p.cos_amp = numbers(j["cos"], "p.cos");
    if (j.contains("sin")) p.sin_amp = numbers(j["sin"], "p.sin");
    return p;
}

CompactPotential parse_q(const json& j) {
    const double t = number(need(j, "t", "q"), "q.t");
    if (!(t >= 0.0)) throw ConfigError("q.t", "must be >= 0");
    CompactPotential q;
    if (j.contains("bump")) {
        q = CompactPotential::bump(number(j["bump"], "q.bump"), t);
    } else if (j.contains("constant")) {
        q = CompactPotential::constant(number(j["constant"], "q.constant"), t);
    } else {
        q.t = t;
        if (j.contains("pieces")) {
            const auto& ps = j["pieces"];
            if (!ps.is_array()) throw ConfigError("q.pieces", "expected an array");
            for (std::size_t i = 0; i < ps.size(); ++i) {
                const std::string path = "q.pieces[" + std::to_string(i) + "]";
                Piece pc;
                pc.from = number(need(ps[i], "from", path), path + ".from");
                pc.to = number(need(ps[i], "to", path), path + ".to");
                pc.poly = numbers(need(ps[i], "poly", path), path + ".poly");
                q.pieces.push_back(pc);
            }
        }
    }
    try {
        q.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("q", e.what());
    }
    return q;
}

}  // namespace

void apply_tolerance(Settings& s, const std::string& key, double v) {
    if (key == "ode_abs") s.ode.abs = v;
    else if (key == "ode_rel") s.ode.rel = v;
    else if (key == "tol_mu") s.tol_mu = v;
    else if (key == "tol_edge") s.tol_edge = v;
    else if (key == "tol_cls") s.tol_cls = v;
    else if (key == "closed_gap") s.closed_gap = v;
    else if (key == "samples_per_gap") s.samples_per_gap = int(v);
    else if (key == "zero_rel") s.zero_rel = v;
    else throw ConfigError("tol." + key, "unknown tolerance");
}

Rect parse_region(const std::string& text) {
    std::stringstream ss(text);
    std::string item;
    std::vector<double> v;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("region", "not a number: " + item);
        }
    }
    if (v.size() != 4) throw ConfigError("region", "expected x0,x1,y0,y1");
    Rect r{v[0], v[1], v[2], v[3]};
    if (!(r.x0 < r.x1 && r.y0 < r.y1 && r.y1 < 0.0)) throw ConfigError("region", "expected x0<x1, y0<y1<0");
    return r;
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("", "top level must be an object");
    RunConfig c;
    c.p = parse_p(need(j, "p", ""));
    c.q = parse_q(need(j, "q", ""));
    if (j.contains("N")) {
        if (!j["N"].is_number_integer() || j["N"].get<int>() < 1) throw ConfigError("N", "expected an integer >= 1");
        c.N = j["N"].get<int>();
    }
    if (j.contains("z_max")) c.z_max = number(j["z_max"], "z_max");
    if (j.contains("r_max")) c.r_max = number(j["r_max"], "r_max");
    if (j.contains("region")) {
        auto v = numbers(j["region"], "region");
        if (v.size() != 4) throw ConfigError("region", "expected [x0, x1, y0, y1]");
        std::ostringstream os;
        os.precision(17);
        os << v[0] << ',' << v[1] << ',' << v[2] << ',' << v[3];
        c.region = parse_region(os.str());
    }
    if (j.contains("tol")) {
        if (!j["tol"].is_object()) throw ConfigError("tol", "expected an object");
        for (auto it = j["tol"].begin(); it != j["tol"].end(); ++it)
            apply_tolerance(c.settings, it.key(), number(it.value(), "tol." + it.key()));
    }
    if (j.contains("threads")) c.settings.threads = int(number(j["threads"], "threads"));
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("out", "expected a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("verify")) {
        const auto& v = j["verify"];
        if (v.contains("from")) c.verify_from = int(number(v["from"], "verify.from"));
        if (v.contains("to")) c.verify_to = int(number(v["to"], "verify.to"));
    }
    if (j.contains("count")) {
        const auto& v = j["count"];
        if (v.contains("r")) c.count_r = number(v["r"], "count.r");
        if (v.contains("points")) c.count_points = int(number(v["points"], "count.points"));
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["p"] = {{"mean", c.p.mean}, {"cos", c.p.cos_amp}, {"sin", c.p.sin_amp}};
    json pieces = json::array();
    for (const auto& pc : c.q.pieces) pieces.push_back({{"from", pc.from}, {"to", pc.to}, {"poly", pc.poly}});
    j["q"] = {{"t", c.q.t}, {"pieces", pieces}};
    j["N"] = c.N;
    j["z_max"] = c.z_max;
    j["r_max"] = c.r_max;
    if (c.region) j["region"] = {c.region->x0, c.region->x1, c.region->y0, c.region->y1};
    const auto& s = c.settings;
    j["tol"] = {{"ode_abs", s.ode.abs}, {"ode_rel", s.ode.rel},     {"tol_mu", s.tol_mu},
                {"tol_edge", s.tol_edge}, {"tol_cls", s.tol_cls},   {"closed_gap", s.closed_gap},
                {"samples_per_gap", s.samples_per_gap}, {"zero_rel", s.zero_rel}};
    j["threads"] = s.threads;
    j["out"] = c.out;
    j["verify"] = {{"from", c.verify_from}, {"to", c.verify_to}};
    j["count"] = {{"r", c.count_r}, {"points", c.count_points}};
    return j;
}

}  // namespace hillres
