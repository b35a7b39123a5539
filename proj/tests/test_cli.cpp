#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "common.hpp"
#include "hillres/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("hillres_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const json& j) {
    auto p = dir / "in.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int run(const std::string& args, const fs::path& err) {
    const std::string cmd = std::string(HILLRES_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

// rows of a CSV file without comment and header lines
std::vector<std::vector<std::string>> rows(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::vector<std::vector<std::string>> out;
    bool header = true;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

}  // namespace

TEST_CASE("cli: configuration errors exit with code 2 and name the field") {
    auto d = scratch("config");
    auto cfg = write_config(d, {{"p", {{"cos", {2.0}}}}, {"N", 3}});
    CHECK(run("bands --config " + cfg.string() + " --out " + (d / "o").string(), d / "err") == 2);
    CHECK(slurp(d / "err").find("q") != std::string::npos);

    auto bad = write_config(d, {{"p", {{"cos", {2.0}}}}, {"q", {{"t", 1.0}, {"bump", "x"}}}});
    CHECK(run("bands --config " + bad.string() + " --out " + (d / "o").string(), d / "err") == 2);
    CHECK(slurp(d / "err").find("q.bump") != std::string::npos);

    auto ok = write_config(d, {{"p", {{"cos", {2.0}}}}, {"q", {{"t", 1.0}, {"bump", 1.0}}}});
    CHECK(run("bands --config " + ok.string() + " --out " + (d / "o").string() + " --tol nonsense=1", d / "err") == 2);
}

TEST_CASE("cli bands: free potential and Mathieu") {
    auto d = scratch("bands");
    auto cfg = write_config(d, {{"p", json::object()}, {"q", {{"t", 1.0}, {"constant", 0.0}}}, {"N", 5}});
    REQUIRE(run("bands --config " + cfg.string() + " --out " + (d / "free").string(), d / "err") == 0);
    for (const auto& r : rows(d / "free" / "bands.csv")) CHECK(std::stod(r[4]) == 0.0);

    auto mc = write_config(d, {{"p", {{"cos", {2.0}}}}, {"q", {{"t", 1.0}, {"constant", 0.0}}}, {"N", 8}});
    REQUIRE(run("bands --config " + mc.string() + " --out " + (d / "m").string(), d / "err") == 0);
    const auto o = hillres::oracle::periodic_edges_oracle(testing::mathieu(), 8);
    const auto rs = rows(d / "m" / "bands.csv");
    REQUIRE(rs.size() == 8);
    for (const auto& r : rs) {
        const int n = std::stoi(r[0]);
        CHECK(std::abs(std::stod(r[1]) - o.em[n]) < 1e-5);
        CHECK(std::abs(std::stod(r[2]) - o.ep[n]) < 1e-5);
    }
}

TEST_CASE("cli states: one state per open gap without a perturbation") {
    auto d = scratch("free_states");
    auto cfg = write_config(d, {{"p", {{"cos", {2.0}}, {"sin", {-1.0}}}}, {"q", {{"t", 1.0}, {"constant", 0.0}}}, {"N", 4}, {"z_max", 14.0}});
    REQUIRE(run("states --config " + cfg.string() + " --out " + (d / "o").string(), d / "err") == 0);
    const auto j = json::parse(slurp(d / "o" / "states.json"));
    REQUIRE_FALSE(j["gaps"].empty());
    for (const auto& g : j["gaps"]) CHECK(g["count"] == 1);
    CHECK(j["violations"].empty());
}

TEST_CASE("cli states: square-well resonances") {
    auto d = scratch("well");
    auto cfg = write_config(d, {{"p", json::object()}, {"q", {{"t", 1.0}, {"constant", -4.0}}}, {"N", 4}, {"z_max", 10.0}, {"r_max", 10.0}});
    REQUIRE(run("states --config " + cfg.string() + " --out " + (d / "o").string(), d / "err") == 0);
    const auto j = json::parse(slurp(d / "o" / "states.json"));
    std::vector<hillres::cplx> res;
    for (const auto& s : j["states"])
        if (s["kind"] == "resonance") res.emplace_back(s["re_z"].get<double>(), s["im_z"].get<double>());
    const auto ref = hillres::oracle::squarewell_resonances(4.0, 1.0, 10.0);
    REQUIRE(res.size() == ref.size());
    for (const auto& z : ref) {
        double best = 1e300;
        for (const auto& w : res) best = std::min(best, std::abs(w - z));
        CHECK(best < 1e-6);
    }
}

TEST_CASE("cli states: corrupted zero tolerance is caught by the structural checks") {
    auto d = scratch("fault");
    auto cfg = write_config(d, {{"p", {{"cos", {2.0}}}}, {"q", {{"t", 1.5}, {"bump", 8.0}}}, {"N", 6}, {"z_max", 12.0}});
    CHECK(run("states --config " + cfg.string() + " --out " + (d / "ok").string(), d / "err") == 0);
    CHECK(run("states --config " + cfg.string() + " --out " + (d / "bad").string() + " --tol zero_rel=0.5", d / "err") == 3);
    CHECK(slurp(d / "err").find("violation") != std::string::npos);
}

TEST_CASE("cli: a run is reproduced bit for bit from its emitted config") {
    auto d = scratch("roundtrip");
    auto cfg = write_config(d, {{"p", {{"cos", {2.0}}, {"sin", {0.0, 0.5}}}}, {"q", {{"t", 1.2}, {"bump", -3.0}}}, {"N", 4}, {"z_max", 10.0}, {"r_max", 6.0}});
    REQUIRE(run("states --config " + cfg.string() + " --out " + (d / "a").string() + " --tol tol_cls=2e-3", d / "err") == 0);
    REQUIRE(run("states --config " + (d / "a" / "config.json").string() + " --out " + (d / "b").string(), d / "err") == 0);
    for (const char* f : {"states.csv", "states.json"}) CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    const auto ca = json::parse(slurp(d / "a" / "config.json")), cb = json::parse(slurp(d / "b" / "config.json"));
    CHECK(ca["tol"] == cb["tol"]);
}

TEST_CASE("cli verify and count") {
    auto d = scratch("verify");
    auto free = write_config(d, {{"p", {{"cos", {0.8, 0.4}}, {"sin", {-1.0, -0.5}}}}, {"q", {{"t", 1.0}, {"constant", 0.0}}}, {"N", 8}, {"verify", {{"from", 1}, {"to", 6}}}});
    REQUIRE(run("verify --config " + free.string() + " --out " + (d / "f").string(), d / "err") == 0);
    for (const auto& r : rows(d / "f" / "verify.csv"))
        if (r[0] == "generic") CHECK(std::stod(r[4]) < 1e-6);

    auto even = write_config(d, {{"p", {{"cos", {0.8, 0.4, 0.27}}}}, {"q", {{"t", 1.3}, {"bump", 2.0}}}, {"N", 8}, {"verify", {{"from", 1}, {"to", 6}}}});
    run("verify --config " + even.string() + " --out " + (d / "e").string(), d / "err");
    bool adjudicated = false;
    for (const auto& r : rows(d / "e" / "verify.csv"))
        if (r[0] == "adjudication") adjudicated = r[2] == "even_momentum_gap" || r[2] == "even_energy_gap";
    CHECK(adjudicated);

    auto well = write_config(d, {{"p", json::object()}, {"q", {{"t", 1.0}, {"constant", -4.0}}}, {"N", 4}, {"r_max", 12.0}});
    REQUIRE(run("count --config " + well.string() + " --out " + (d / "c").string(), d / "err") == 0);
    const auto rs = rows(d / "c" / "count.csv");
    REQUIRE_FALSE(rs.empty());
    CHECK(std::stoi(rs.back()[1]) == int(hillres::oracle::squarewell_resonances(4.0, 1.0, 12.0).size()));
}
