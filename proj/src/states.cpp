#include "hillres/states.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "hillres/errors.hpp"

namespace hillres {

namespace {

constexpr double kPi = std::numbers::pi;

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

struct RealRoot {
    double x;
    int mult;
};

template <class Fn>
double refine(Fn&& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t it = 100;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), it);
    return 0.5 * (r.first + r.second);
}

// roots of a real function from samples: sign changes, near-zero samples and dips towards zero
template <class Fn>
std::vector<RealRoot> scan_roots(Fn&& f, const std::vector<double>& xs, const std::vector<double>& fs, double zero_tol) {
    const std::size_t K = xs.size();
    std::vector<RealRoot> out;
    std::vector<bool> zero(K);
    for (std::size_t j = 0; j < K; ++j) zero[j] = std::abs(fs[j]) <= zero_tol;
    auto sgn = [](double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
    auto dip = [&](double a, double b, int s) {
        auto g = [&](double x) { return s * f(x); };
        std::uintmax_t it = 80;
        return boost::math::tools::brent_find_minima(g, a, b, 40, it);
    };
    for (std::size_t j = 0; j < K; ++j) {
        if (zero[j]) {
            if (j == 0 || j + 1 == K) {
                out.push_back({xs[j], 1});
            } else if (j > 0 && zero[j - 1]) {
                continue;  // same root, already recorded
            } else if (sgn(fs[j - 1]) != sgn(fs[j + 1]) && !zero[j + 1]) {
                out.push_back({refine(f, xs[j - 1], xs[j + 1], fs[j - 1], fs[j + 1]), 1});
            } else if (!zero[j + 1]) {
                const int s = sgn(fs[j - 1]);
                out.push_back({dip(xs[j - 1], xs[j + 1], s).first, 2});
            } else {
                out.push_back({xs[j], 1});
            }
            continue;
        }
        if (j + 1 < K && !zero[j + 1] && sgn(fs[j]) * sgn(fs[j + 1]) < 0)
            out.push_back({refine(f, xs[j], xs[j + 1], fs[j], fs[j + 1]), 1});
        if (j > 0 && j + 1 < K && !zero[j - 1] && !zero[j + 1] && sgn(fs[j - 1]) == sgn(fs[j]) &&
            sgn(fs[j]) == sgn(fs[j + 1]) && std::abs(fs[j]) < std::abs(fs[j - 1]) &&
            std::abs(fs[j]) < std::abs(fs[j + 1])) {
            const int s = sgn(fs[j]);
            auto [xm, gm] = dip(xs[j - 1], xs[j + 1], s);
            if (gm < -zero_tol) {
                out.push_back({refine(f, xs[j - 1], xm, fs[j - 1], s * gm), 1});
                out.push_back({refine(f, xm, xs[j + 1], s * gm, fs[j + 1]), 1});
            } else if (std::abs(gm) <= zero_tol) {
                out.push_back({xm, 2});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.x < b.x; });
    return out;
}

State make_state(const Model& m, cplx z, Rim rim, int gap, Kind kind, int mult) {
    State s;
    s.point = SurfacePoint{z, rim, gap};
    s.kind = kind;
    s.multiplicity = mult;
    s.gap = gap;
    s.energy_c = z * z + m.bands.gauge_shift();
    s.energy = s.energy_c.real();
    return s;
}

Rim rim_of(Kind k) { return k == Kind::Antibound ? Rim::Lower : Rim::Upper; }

template <class Fn>
void parallel_for(int count, int threads, Fn&& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> workers;
    for (int w = 0; w < threads; ++w)
        workers.push_back(std::async(std::launch::async, [&] {
            for (int i = next++; i < count; i = next++) body(i);
        }));
    for (auto& f : workers) f.get();
}

}  // namespace

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Bound: return "bound";
        case Kind::Antibound: return "antibound";
        case Kind::Virtual: return "virtual";
        case Kind::Resonance: return "resonance";
    }
    return "?";
}

int GapReport::total() const {
    int c = 0;
    for (const auto& s : states) c += s.multiplicity;
    for (const auto& u : unclassified) c += u.multiplicity;
    return c;
}

double h_sn(const BandStructure& b, int n) {
    const auto M = monodromy(b.p, b.mu[n], 0.0, b.tol);
    return -std::asinh(parity_sign(n) * M.beta.real());
}

State unperturbed_state(const BandStructure& b, int n, const Settings& s) {
    if (n < 1 || n > b.N) throw std::out_of_range("unperturbed_state: gap index");
    if (!b.open[n]) throw DegenerateGap("gap " + std::to_string(n) + " is closed");
    const double mu = b.mu[n], w = b.width(n);
    State st;
    st.gap = n;
    if (std::abs(mu - b.em[n]) <= s.tol_edge * w || std::abs(mu - b.ep[n]) <= s.tol_edge * w) {
        const double e = std::abs(mu - b.em[n]) <= std::abs(mu - b.ep[n]) ? b.em[n] : b.ep[n];
        st.point = SurfacePoint{e, Rim::Upper, n};
        st.kind = Kind::Virtual;
    } else {
        const double h = h_sn(b, n);
        st.kind = h > 0 ? Kind::Bound : Kind::Antibound;
        st.point = SurfacePoint{mu, rim_of(st.kind), n};
    }
    const double x = st.point.z.real();
    st.energy = x * x + b.gauge_shift();
    st.energy_c = st.energy;
    return st;
}

GapReport find_gap_states(const Model& m, int n) {
    const auto& b = m.bands;
    const auto& set = m.settings;
    if (n < 1 || n > b.N) throw std::out_of_range("find_gap_states: gap index");
    if (!b.open[n]) throw DegenerateGap("gap " + std::to_string(n) + " is closed");
    GapReport rep;
    rep.n = n;
    rep.unperturbed = unperturbed_state(b, n, set).kind;
    const double e0 = b.em[n], e1 = b.ep[n], w = e1 - e0, mu = b.mu[n];

    const int K = set.samples_per_gap * std::max(1, m.cs.nt);
    std::vector<double> xs(K + 1), fs(K + 1);
    std::vector<GapSample> gs(K + 1);
    for (int j = 0; j <= K; ++j) {
        xs[j] = (j == K) ? e1 : e0 + w * double(j) / K;
        gs[j] = gap_sample(m, n, xs[j]);
        fs[j] = gs[j].F;
    }
    double Fscale = 0.0;
    for (double f : fs) Fscale = std::max(Fscale, std::abs(f));
    auto F = [&](double x) { return gap_sample(m, n, x).F; };
    const auto roots = scan_roots(F, xs, fs, set.zero_rel * Fscale);

    // persistence of the unperturbed state at mu_n
    if (m.cs.nt == 0) {
        rep.persistence = true;
    } else {
        auto [P, Pp] = phi_pert(m.p(), m.q, m.cs.nt, mu, m.tol());
        rep.phi_nt_mu = P.real();
        rep.persistence = std::abs(mu * P) <= 1e-8 * std::abs(Pp);
    }

    for (const auto& r : roots) {
        const double x = r.x;
        const auto g = gap_sample(m, n, x);
        auto add = [&](Kind kind, double at) {
            State s = make_state(m, at, rim_of(kind), n, kind, r.mult);
            s.res_F = std::abs(g.F) / std::max(Fscale, 1e-300);
            s.res_up = std::abs(g.G_up);
            s.res_dn = std::abs(g.G_dn);
            rep.states.push_back(s);
        };
        if (std::abs(x - mu) <= set.tol_mu * w && rep.persistence) {
            // the unperturbed state survives where it was
            State s = unperturbed_state(b, n, set);
            s.multiplicity = r.mult;
            s.res_F = std::abs(g.F) / std::max(Fscale, 1e-300);
            rep.states.push_back(s);
            continue;
        }
        const double de = std::min(std::abs(x - e0), std::abs(x - e1));
        if (de <= set.tol_edge * w) {
            const double e = std::abs(x - e0) <= std::abs(x - e1) ? e0 : e1;
            const auto ge = gap_sample(m, n, e);
            // F = edge^2 / phi1 at an edge: a small F there means the edge value vanishes
            if (std::abs(ge.F) <= 10.0 * set.tol_edge * Fscale) {
                State s = make_state(m, e, Rim::Upper, n, Kind::Virtual, r.mult);
                s.res_F = std::abs(ge.F) / std::max(Fscale, 1e-300);
                s.res_up = s.res_dn = std::abs(ge.edge);
                rep.states.push_back(s);
            } else {
                rep.unclassified.push_back({x, r.mult, "root next to a band edge with nonzero edge value"});
            }
            continue;
        }
        const double up = std::abs(g.G_up), dn = std::abs(g.G_dn);
        // a root a few hundred ulps from an edge leaves the ratio at the rounding floor;
        // the vanishing factor is then the one that changes sign across the root
        auto flips = [&]() -> int {
            const double h = 0.25 * std::min({de, std::abs(x - mu) > 0.0 ? std::abs(x - mu) : de});
            if (!(h > 8.0 * std::numeric_limits<double>::epsilon() * x)) return 0;
            const auto a = gap_sample(m, n, x - h), c = gap_sample(m, n, x + h);
            const bool fu = a.G_up * c.G_up < 0.0, fd = a.G_dn * c.G_dn < 0.0;
            if (fu == fd) return 0;
            return fu ? 1 : -1;
        };
        if (up <= set.tol_cls * dn)
            add(Kind::Bound, x);
        else if (dn <= set.tol_cls * up)
            add(Kind::Antibound, x);
        else if (const int f = (r.mult % 2 == 1) ? flips() : 0; f != 0)
            add(f > 0 ? Kind::Bound : Kind::Antibound, x);
        else
            rep.unclassified.push_back(
                {x, r.mult,
                 std::abs(x - mu) <= set.tol_mu * w ? "root within tol_mu of mu_n without persistence"
                                                     : "rim residuals comparable"});
    }
    return rep;
}

NegativeStates find_negative_states(const Model& m, double z_max) {
    NegativeStates out;
    const auto& b = m.bands;
    // Psi_0^+(0) with k = 0
    {
        auto d = local_data(m, 0.0);
        const cplx v = d.M.phi1 * d.tilde.theta0 + d.M.beta * d.tilde.phi0;
        const double scale = std::abs(d.M.phi1 * d.tilde.theta0) + std::abs(d.M.beta * d.tilde.phi0);
        out.psi_at_zero = (v / d.M.phi1).real();
        out.zero_virtual = std::abs(v) <= 1e-8 * scale;
    }
    auto scan = [&](double lo, double hi, int K, int side) {
        if (hi <= lo) return;
        std::vector<double> hs(K + 1), fs(K + 1);
        auto f = [&](double h) {
            const cplx z(0.0, side * h);
            return side > 0 ? jost_plus(m, SurfacePoint{z}).real() : jost_plus_tilde(m, SurfacePoint{z}).real();
        };
        double scale = 0.0;
        for (int j = 0; j <= K; ++j) {
            hs[j] = lo + (hi - lo) * double(j) / K;
            fs[j] = f(hs[j]);
            scale = std::max(scale, std::abs(fs[j]));
        }
        for (const auto& r : scan_roots(f, hs, fs, 1e-12 * scale)) {
            const Kind k = side > 0 ? Kind::Bound : Kind::Antibound;
            State s = make_state(m, cplx(0.0, side * r.x), Rim::None, 0, k, r.mult);
            s.gap = 0;
            s.res_F = std::abs(f(r.x)) / std::max(scale, 1e-300);
            out.states.push_back(s);
        }
    };
    const double vmin = b.p.min_value() + std::min(0.0, m.q.min_value());
    const double hb = std::min(z_max, std::sqrt(std::max(0.0, -vmin)) + 0.5);
    const double tt = std::max(1.0, m.q.t);
    scan(1e-6, hb, int(std::ceil(200 * tt * std::max(1.0, hb))), +1);
    const double ha = std::min(z_max, resonance_depth(m.cs, z_max));
    scan(1e-6, ha, int(std::ceil(50 * tt * std::max(1.0, ha))), -1);
    return out;
}

double resonance_depth(const SupportConstants& c, double r) {
    const double t = std::max(c.t, 1e-3);
    return 3.0 / t * std::log(2.0 + r) + 1.0;
}

std::vector<State> find_resonances(const Model& m, const Rect& region, const ResonanceOptions& opt) {
    if (region.y1 >= 0.0) throw std::invalid_argument("find_resonances: region must lie in the lower half plane");
    ContourOptions co = opt.contour;
    co.base_step = std::min(co.base_step, 1.0 / (2.0 * m.q.t + 2.0));
    std::vector<ZeroCluster> zs;
    Rect r = region;
    for (int attempt = 0;; ++attempt) {
        ArgumentPrinciple ap([&m](cplx z) { return regular_jost(m, z); }, co);
        try {
            zs = ap.zeros(r);
            break;
        } catch (const ContourThroughZero&) {
            if (attempt == 3) throw;
            // nudge the outer boundary off the offending zero
            const double d = 1e-3 * (attempt + 1);
            r.x0 += (r.x0 == 0.0 ? d : d * std::abs(r.x0) * 0.01 + d);
            r.x1 += d * 0.37;
            r.y0 -= d * 0.53;
        }
    }
    std::vector<State> out;
    for (const auto& zc : zs) {
        if (opt.prune_forbidden && forbidden(m.cs, zc.z)) continue;
        State s = make_state(m, zc.z, Rim::None, -1, Kind::Resonance, zc.multiplicity);
        s.res_F = std::abs(regular_jost(m, zc.z));
        out.push_back(s);
    }
    return out;
}

std::vector<State> find_resonances(const Model& m, const ResonanceOptions& opt) {
    const double Y = opt.depth > 0.0 ? opt.depth : resonance_depth(m.cs, opt.r_max);
    const double d = opt.strip;
    std::vector<Rect> boxes;
    // strips of unit width keep the first contours short
    const int S = std::max(1, int(std::ceil(opt.r_max / 4.0)));
    for (int side : {1, -1})
        for (int i = 0; i < S; ++i) {
            const double a = d + (opt.r_max - d) * double(i) / S, c = d + (opt.r_max - d) * double(i + 1) / S;
            Rect r{side > 0 ? a : -c, side > 0 ? c : -a, -Y, -d};
            boxes.push_back(r);
        }
    std::vector<std::vector<State>> parts(boxes.size());
    parallel_for(int(boxes.size()), m.settings.threads, [&](int i) { parts[i] = find_resonances(m, boxes[i], opt); });
    std::vector<State> out;
    for (auto& p : parts)
        for (auto& s : p)
            if (std::abs(s.point.z) <= opt.r_max) out.push_back(s);
    std::sort(out.begin(), out.end(), [](const State& a, const State& b) {
        const double ra = std::abs(a.point.z), rb = std::abs(b.point.z);
        if (ra != rb) return ra < rb;
        return a.point.z.real() < b.point.z.real();
    });
    return out;
}

CountCurve count_curve(const std::vector<State>& res, double r, double t, int points) {
    CountCurve c;
    c.target = 2.0 * t / kPi;
    for (int i = 1; i <= points; ++i) {
        const double ri = r * double(i) / points;
        int n = 0;
        for (const auto& s : res)
            if (std::abs(s.point.z) <= ri) n += s.multiplicity;
        c.r.push_back(ri);
        c.N.push_back(n);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < c.r.size(); ++i) {
        if (c.r[i] < 0.5 * r) continue;
        sx += c.r[i];
        sy += c.N[i];
        sxx += c.r[i] * c.r[i];
        sxy += c.r[i] * c.N[i];
        ++cnt;
    }
    if (cnt >= 2) c.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return c;
}

CountCurve count_states(const Model& m, double r, int points, const ResonanceOptions& opt) {
    ResonanceOptions o = opt;
    o.r_max = r;
    return count_curve(find_resonances(m, o), r, m.q.t, points);
}

namespace {

// int_a^b |y|^2 for the solution with data (y0, y0') at a, V = p + q (q may be null)
double l2_on(const PeriodicPotential& p, const CompactPotential* q, cplx lambda, double a, double b, cplx y0,
             cplx y0p, const std::vector<double>& cuts, const OdeTol& tol) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& ab = GL::abscissa();
    const auto& wt = GL::weights();
    std::vector<double> edges{a, b};
    for (double c : cuts)
        if (c > a && c < b) edges.push_back(c);
    std::sort(edges.begin(), edges.end());
    const double per = std::max(4.0, std::sqrt(std::abs(lambda)));
    std::vector<double> nodes, weights;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double lo = edges[e], hi = edges[e + 1];
        const int pieces = std::max(1, int(std::ceil((hi - lo) * per / 2.0)));
        for (int k = 0; k < pieces; ++k) {
            const double u = lo + (hi - lo) * k / pieces, v = lo + (hi - lo) * (k + 1) / pieces;
            const double c = 0.5 * (u + v), h = 0.5 * (v - u);
            for (std::size_t i = 0; i < ab.size(); ++i) {
                const double xi = ab[i];
                if (xi == 0.0) {
                    nodes.push_back(c);
                    weights.push_back(h * wt[i]);
                } else {
                    nodes.push_back(c - h * xi);
                    weights.push_back(h * wt[i]);
                    nodes.push_back(c + h * xi);
                    weights.push_back(h * wt[i]);
                }
            }
        }
    }
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return nodes[i] < nodes[j]; });
    std::vector<double> sorted(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = nodes[order[i]];
    const auto cols = propagate_through(p, q, lambda, 0.0, a, sorted, {y0, y0p, 0.0, 1.0}, tol);
    double sum = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) sum += weights[order[i]] * std::norm(cols[i][0]);
    return sum;
}

}  // namespace

NormingResult norming(const Model& m, const State& s) {
    if (s.kind != Kind::Bound) throw NotABoundState("norming: state is not bound");
    const auto& b = m.bands;
    const cplx z = s.point.z;
    const bool on_gap = z.imag() == 0.0;
    if (!on_gap && !(z.real() == 0.0 && z.imag() > 0.0)) throw NotABoundState("norming: point not on a physical set");
    const SurfacePoint pt = on_gap ? rim_point(b, z.real(), Rim::Upper) : SurfacePoint{z};
    NormingResult res;

    auto d = local_data(m, z);
    const auto k = quasimomentum(b, d.M, pt);
    const cplx mp = weyl_m(b, d.M, k, +1);
    const cplx psi0 = d.tilde.theta0 + mp * d.tilde.phi0;
    const cplx psi0p = d.tilde.theta0p + mp * d.tilde.phi0p;
    const cplx lam = z * z;

    const int nt = m.cs.nt;
    const auto cuts = m.q.breakpoints();
    double inner = 0.0;
    if (nt > 0) inner = l2_on(m.p(), &m.q, lam, 0.0, double(nt), psi0, psi0p, cuts, m.tol());
    const double cell = l2_on(m.p(), nullptr, lam, 0.0, 1.0, 1.0, mp, {}, m.tol());
    const double rho = std::norm(std::exp(cplx(0.0, 1.0) * k.k));
    if (rho >= 1.0) throw NotABoundState("norming: Floquet solution does not decay");
    res.by_integral = inner + std::pow(rho, nt) / (1.0 - rho) * cell;

    // d/dz Psi_0^+ along the set carrying the state
    auto psi_at = [&](double off) {
        if (on_gap) return jost_plus_tilde(m, rim_point(b, z.real() + off, Rim::Upper));
        return jost_plus(m, SurfacePoint{z + cplx(0.0, off)});
    };
    double h = 1e-4 * std::max(1.0, std::abs(z));
    if (on_gap) {
        const int n = pt.gap;
        const double dist = std::min({std::abs(z.real() - b.em[n]), std::abs(z.real() - b.ep[n]),
                                      std::abs(z.real() - b.mu[n])});
        h = std::min(h, 0.05 * dist);
    } else {
        h = std::min(h, 0.05 * z.imag());
    }
    // the nearest edge is a square-root branch point, so the step stays well inside its distance
    auto d5 = [&](double s) { return (-psi_at(2 * s) + 8.0 * psi_at(s) - 8.0 * psi_at(-s) + psi_at(-2 * s)) / (12.0 * s); };
    const cplx diff = (16.0 * d5(0.5 * h) - d5(h)) / 15.0;
    const cplx dpsi = on_gap ? diff : diff / cplx(0.0, 1.0);
    res.by_derivative = (-psi0p / (2.0 * z) * dpsi).real();

    if (on_gap) {
        const int n = pt.gap;
        auto F = [&](double x) { return gap_sample(m, n, x).F; };
        const double x = z.real();
        const double dF = (-F(x + 2 * h) + 8 * F(x + h) - 8 * F(x - h) + F(x - 2 * h)) / (12 * h);
        res.sign_check = parity_sign(n) * dF / x;
    }
    return res;
}

StructuralReport structural_checks(const Model& m, const std::vector<GapReport>& reports) {
    StructuralReport out;
    for (const auto& r : reports) {
        const std::string tag = "gap " + std::to_string(r.n) + ": ";
        for (const auto& u : r.unclassified) out.violations.push_back(tag + "unclassified root at " + std::to_string(u.x) + " (" + u.reason + ")");
        if (r.total() % 2 == 0) out.violations.push_back(tag + "even state count " + std::to_string(r.total()));
        std::vector<const State*> sorted;
        for (const auto& s : r.states) sorted.push_back(&s);
        std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->point.z.real() < b->point.z.real(); });
        for (const auto* s : sorted) {
            if (s->kind != Kind::Bound) continue;
            const auto g = gap_sample(m, r.n, s->point.z.real());
            // |phi1 theta~| + |(beta - s) phi~|, the two terms of G_dn
            const double terms = std::abs(g.phi1 * g.theta0) + std::abs(g.edge - g.phi1 * g.theta0 - g.s * g.phi0);
            if (std::abs(g.G_dn) <= m.settings.tol_cls * std::max(terms, std::abs(g.G_up)))
                out.violations.push_back(tag + "bound state at " + std::to_string(s->point.z.real()) + " is also antibound");
        }
        const State* last = nullptr;
        int between = 0;
        for (const auto* s : sorted) {
            if (s->kind == Kind::Antibound) between += s->multiplicity;
            if (s->kind != Kind::Bound) continue;
            if (last && between % 2 == 0)
                out.violations.push_back(tag + "even antibound count between bound states at " +
                                         std::to_string(last->point.z.real()) + " and " + std::to_string(s->point.z.real()));
            last = s;
            between = 0;
        }
    }
    return out;
}

StatesRun find_all_states(const Model& m, double z_max, const ResonanceOptions& opt, int threads) {
    StatesRun run;
    const auto& b = m.bands;
    std::vector<int> gaps;
    for (int n = 1; n <= b.N; ++n)
        if (b.open[n] && b.ep[n] <= z_max) gaps.push_back(n);
    run.gaps.resize(gaps.size());
    parallel_for(int(gaps.size()), threads, [&](int i) { run.gaps[i] = find_gap_states(m, gaps[i]); });
    run.negative = find_negative_states(m, z_max);
    if (opt.r_max > 0.0) run.resonances = find_resonances(m, opt);
    run.structure = structural_checks(m, run.gaps);
    return run;
}

}  // namespace hillres
