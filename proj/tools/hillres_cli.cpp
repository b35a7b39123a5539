#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hillres/asymptotics.hpp"
#include "hillres/config.hpp"
#include "hillres/errors.hpp"

using namespace hillres;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kStructure = 3, kNumeric = 4 };

std::ofstream open_out(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.out);
    std::ofstream f(std::filesystem::path(c.out) / name);
    if (!f) throw ConfigError("out", "cannot write " + name);
    f.precision(15);
    return f;
}

void echo_config(const RunConfig& c) { open_out(c, "config.json") << to_json(c).dump(2) << "\n"; }

Model build(const RunConfig& c) { return make_model(c.p, c.q, c.N, c.settings); }

const char* rim_name(Rim r) {
    switch (r) {
        case Rim::Upper: return "upper";
        case Rim::Lower: return "lower";
        default: return "none";
    }
}

int cmd_bands(const RunConfig& c) {
    const auto b = band_edges(gauge(c.p, c.settings.ode), c.N, c.settings.ode, c.settings.closed_gap);
    auto f = open_out(c, "bands.csv");
    f << "# gauge_shift=" << b.gauge_shift() << "\n";
    f << "n,E_minus,E_plus,mu_sq,gap_len,gauge_shift\n";
    for (int n = 1; n <= b.N; ++n)
        f << n << ',' << b.E_minus(n) << ',' << b.E_plus(n) << ',' << b.mu[n] * b.mu[n] + b.gauge_shift() << ','
          << (b.open[n] ? b.E_plus(n) - b.E_minus(n) : 0.0) << ',' << b.gauge_shift() << "\n";
    return kOk;
}

json state_json(const State& s) {
    return {{"gap", s.gap},
            {"re_z", s.point.z.real()},
            {"im_z", s.point.z.imag()},
            {"rim", rim_name(s.point.rim)},
            {"kind", kind_name(s.kind)},
            {"multiplicity", s.multiplicity},
            {"energy_re", s.energy_c.real()},
            {"energy_im", s.energy_c.imag()},
            {"residual", s.res_F}};
}

int cmd_states(const RunConfig& c) {
    const Model m = build(c);
    ResonanceOptions ro;
    ro.r_max = c.region ? 0.0 : c.r_max;
    StatesRun run = find_all_states(m, c.z_max, ro, c.settings.threads);
    if (c.region) run.resonances = find_resonances(m, *c.region, ro);

    std::vector<State> all;
    for (const auto& g : run.gaps) all.insert(all.end(), g.states.begin(), g.states.end());
    all.insert(all.end(), run.negative.states.begin(), run.negative.states.end());
    all.insert(all.end(), run.resonances.begin(), run.resonances.end());

    auto f = open_out(c, "states.csv");
    f << "# gauge_shift=" << m.bands.gauge_shift() << "\n";
    f << "n,re_z,im_z,rim,kind,multiplicity,lambda_re,lambda_im,residual\n";
    for (const auto& s : all)
        f << s.gap << ',' << s.point.z.real() << ',' << s.point.z.imag() << ',' << rim_name(s.point.rim) << ','
          << kind_name(s.kind) << ',' << s.multiplicity << ',' << s.energy_c.real() << ',' << s.energy_c.imag() << ','
          << s.res_F << "\n";

    json j;
    j["gauge_shift"] = m.bands.gauge_shift();
    j["states"] = json::array();
    for (const auto& s : all) j["states"].push_back(state_json(s));
    j["gaps"] = json::array();
    for (const auto& g : run.gaps)
        j["gaps"].push_back({{"n", g.n},
                             {"count", g.total()},
                             {"parity_odd", g.parity_ok()},
                             {"persistence", g.persistence},
                             {"unperturbed", kind_name(g.unperturbed)},
                             {"unclassified", g.unclassified.size()}});
    j["zero_virtual"] = run.negative.zero_virtual;
    j["violations"] = run.structure.violations;
    open_out(c, "states.json") << j.dump(2) << "\n";
    for (const auto& v : run.structure.violations) std::cerr << "violation: " << v << "\n";
    return run.structure.ok() ? kOk : kStructure;
}

bool is_even(const PeriodicPotential& p) {
    for (double s : p.sin_amp)
        if (s != 0.0) return false;
    return true;
}

int cmd_verify(const RunConfig& c) {
    const Model m = build(c);
    const int n0 = std::max(1, c.verify_from), n1 = std::min(c.verify_to, m.bands.N);
    auto f = open_out(c, "verify.csv");
    f << "# gauge_shift=" << m.bands.gauge_shift() << "\n";
    f << "section,n,predicted,computed,scaled_residual,verdict\n";
    bool ok = true;
    auto trend = [&](const std::string& name, double value, bool pass) {
        f << "trend," << name << ",," << value << ",," << (pass ? "pass" : "fail") << "\n";
        ok = ok && pass;
    };

    // band-edge and Dirichlet residuals, scaled by n: bounded means the second half does not outgrow the first
    const auto br = band_residuals(m.bands, n1);
    double first = 0, second = 0;
    for (const auto& r : br) {
        f << "band_mu," << r.n << ",,," << r.mu << ",\n";
        f << "band_h," << r.n << ",,," << r.h << ",\n";
        f << "band_edges," << r.n << ",,," << std::max(r.em, r.ep) << ",\n";
        const double worst = std::max({r.mu, r.h, r.em, r.ep});
        double& slot = 2 * r.n <= n1 ? first : second;
        slot = std::max(slot, worst);
    }
    trend("band_residuals_bounded", second, second <= 2.0 * first + 1e-12);

    if (!m.q.is_zero() && !is_even(m.p())) {
        const auto rows = generic_comparison(m, n0, n1);
        std::vector<double> ns, vs;
        for (const auto& r : rows) {
            f << "generic," << r.n << ',' << r.predicted << ',' << r.computed << ',' << r.scaled << ",\n";
            ns.push_back(r.n);
            vs.push_back(r.scaled);
        }
        const double e = trend_exponent(ns, vs);
        trend("generic_scaled_residual_exponent", e, e < 0.0);
    } else if (m.q.is_zero()) {
        const auto rows = generic_comparison(m, n0, n1);
        double worst = 0;
        for (const auto& r : rows) {
            f << "generic," << r.n << ',' << r.predicted << ',' << r.computed << ',' << r.scaled << ",\n";
            worst = std::max(worst, r.scaled);
        }
        trend("unperturbed_residual", worst, worst <= 1e-6);
    }
    if (!m.q.is_zero() && is_even(m.p())) {
        const auto a = adjudicate_even(m, n0, n1);
        for (const auto& r : a.rows) {
            f << "even_energy_gap," << r.n << ',' << r.shift_energy_gap << ',' << r.computed_shift << ','
              << r.ratio_energy_gap << ",\n";
            f << "even_momentum_gap," << r.n << ',' << r.shift_momentum_gap << ',' << r.computed_shift << ','
              << r.ratio_momentum_gap << ",\n";
        }
        f << "adjudication,," << formula_name(a.better) << ",,,\n";
        const double e = a.better == Formula::EvenMomentumGap ? a.trend_momentum_gap : a.trend_energy_gap;
        trend("even_better_variant_exponent", e, e < 0.0);
    }
    if (!m.q.is_zero()) {
        bool all = true;
        for (const auto& r : sign_comparison(m, n0, n1)) {
            if (!r.gated) continue;
            f << "sign," << r.n << ',' << kind_name(r.expected.kind) << (r.expected.side > 0 ? "+" : "-") << ','
              << kind_name(r.computed_kind) << (r.computed_side > 0 ? "+" : "-") << ",," << (r.agrees ? "pass" : "fail")
              << "\n";
            all = all && r.agrees;
        }
        trend("sign_predictions", all ? 1.0 : 0.0, all);
    }
    return ok ? kOk : kNumeric;
}

int cmd_count(const RunConfig& c) {
    const Model m = build(c);
    const double r = c.count_r > 0 ? c.count_r : (c.r_max > 0 ? c.r_max : c.z_max);
    const auto curve = count_states(m, r, c.count_points);
    auto f = open_out(c, "count.csv");
    f << "# slope=" << curve.slope << " target=" << curve.target << "\n";
    f << "r,N\n";
    for (std::size_t i = 0; i < curve.r.size(); ++i) f << curve.r[i] << ',' << curve.N[i] << "\n";
    std::cout << "slope " << curve.slope << " target " << curve.target << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for periodic Schrodinger operators with compact perturbations"};
    app.require_subcommand(1);
    std::string config_path, out_dir, region;
    std::vector<std::string> tols;
    int n_max = 0, threads = 0;
    double z_max = 0.0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--n-max", n_max, "number of gaps in the band table");
        sub->add_option("--z-max", z_max, "largest |z| scanned");
        sub->add_option("--region", region, "resonance rectangle x0,x1,y0,y1");
        sub->add_option("--tol", tols, "tolerance override KEY=VAL")->take_all();
        sub->add_option("--threads", threads, "worker threads");
    };
    auto* bands = app.add_subcommand("bands", "band edges and Dirichlet eigenvalues");
    auto* states = app.add_subcommand("states", "all states up to z_max");
    auto* verify = app.add_subcommand("verify", "asymptotic comparison report");
    auto* count = app.add_subcommand("count", "resonance counting curve");
    for (auto* s : {bands, states, verify, count}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        RunConfig c = load_config(config_path);
        if (!out_dir.empty()) c.out = out_dir;
        if (n_max > 0) c.N = n_max;
        if (z_max > 0) c.z_max = z_max;
        if (!region.empty()) c.region = parse_region(region);
        for (const auto& kv : tols) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("tol", "expected KEY=VAL, got " + kv);
            double v = 0;
            try {
                v = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw ConfigError("tol." + kv.substr(0, eq), "not a number");
            }
            apply_tolerance(c.settings, kv.substr(0, eq), v);
        }
        if (threads > 0) c.settings.threads = threads;
        else if (const char* env = std::getenv("HILLRES_THREADS")) c.settings.threads = std::max(1, std::atoi(env));
        echo_config(c);
        if (*bands) return cmd_bands(c);
        if (*states) return cmd_states(c);
        if (*verify) return cmd_verify(c);
        return cmd_count(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.path << ": " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumeric;
    }
}
