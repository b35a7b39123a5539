#include "hillres/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <lapacke.h>

#include "hillres/errors.hpp"

namespace hillres::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// eigenvalues of the n-point ring on [0,1], corner sign +1 periodic, -1 antiperiodic
Eigen::VectorXd ring_eigs(const PeriodicPotential& p, int n, double corner) {
    const double h = 1.0 / n, s = 1.0 / (h * h);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        A(j, j) = 2.0 * s + p(j * h);
        if (j + 1 < n) A(j, j + 1) = A(j + 1, j) = -s;
    }
    A(0, n - 1) = A(n - 1, 0) = -corner * s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// two rounds of Richardson for an h^2, h^4 error expansion
double richardson3(double a, double b, double c) {
    const double r1 = (4.0 * b - a) / 3.0, r2 = (4.0 * c - b) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

std::vector<double> tridiag_window(const std::vector<double>& d, const std::vector<double>& e, double lo, double hi) {
    const lapack_int n = lapack_int(d.size());
    std::vector<double> w(n), work;
    std::vector<lapack_int> iblock(n), isplit(n);
    lapack_int m = 0, nsplit = 0;
    const lapack_int info = LAPACKE_dstebz('V', 'E', n, lo, hi, 0, 0, 0.0, d.data(), e.data(), &m, &nsplit, w.data(),
                                           iblock.data(), isplit.data());
    if (info != 0) throw Error("dstebz failed");
    w.resize(m);
    return w;
}

// cell averages of p + q on the box mesh
std::vector<double> cell_average(const PeriodicPotential& p, const CompactPotential& q, double h, int n) {
    using GL = boost::math::quadrature::gauss<double, 7>;
    const auto cuts = q.breakpoints();
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) {
        const double x = (j + 1) * h, a = x - 0.5 * h, b = x + 0.5 * h;
        std::vector<double> edges{a, b};
        for (double c : cuts)
            if (c > a && c < b) edges.push_back(c);
        std::sort(edges.begin(), edges.end());
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            sum += GL::integrate([&](double y) { return p(y) + q(y); }, edges[i], edges[i + 1]);
        v[j] = sum / h;
    }
    return v;
}

std::vector<double> box_once(const PeriodicPotential& p, const CompactPotential& q, double L, double lo, double hi,
                             double h0, std::vector<double>* coarse_counts) {
    std::vector<std::vector<double>> levels;
    for (int lev = 0; lev < 3; ++lev) {
        const int n = int(std::round(L / h0)) << lev;
        const double h = L / n;
        const int m = n - 1;
        auto v = cell_average(p, q, h, m);
        std::vector<double> d(m), e(m - 1, -1.0 / (h * h));
        for (int j = 0; j < m; ++j) d[j] = 2.0 / (h * h) + v[j];
        // widen the window so that eigenvalues drifting with h are kept
        const double pad = 0.05 * (hi - lo) + 0.5;
        levels.push_back(tridiag_window(d, e, lo - pad, hi + pad));
    }
    if (coarse_counts) coarse_counts->push_back(double(levels[0].size()));
    std::vector<double> out;
    for (double a : levels[0]) {
        auto near = [&](const std::vector<double>& l, double x) {
            double best = 1e300;
            for (double y : l)
                if (std::abs(y - x) < std::abs(best - x)) best = y;
            return best;
        };
        const double b = near(levels[1], a), c = near(levels[2], b);
        const double r = richardson3(a, b, c);
        if (r > lo && r < hi) out.push_back(r);
    }
    return out;
}

cplx sinc_t(cplx kappa, double t) {
    const cplx x = kappa * t;
    if (std::abs(x) < 1e-4) return t * (1.0 - x * x / 6.0 + x * x * x * x / 120.0);
    return std::sin(x) / kappa;
}

}  // namespace

EdgeTable periodic_edges_oracle(const PeriodicPotential& p, int N, int points) {
    if (points == 0) points = 40 * N;
    if (1.0 / points > 1.0 / (20.0 * N)) throw MeshTooCoarse("mesh does not resolve gap " + std::to_string(N));
    const int need = N + 1;
    std::vector<Eigen::VectorXd> per, anti;
    for (int lev = 0; lev < 3; ++lev) {
        per.push_back(ring_eigs(p, points << lev, 1.0));
        anti.push_back(ring_eigs(p, points << lev, -1.0));
    }
    EdgeTable t;
    t.em.assign(N + 1, 0.0);
    t.ep.assign(N + 1, 0.0);
    auto ext = [&](const std::vector<Eigen::VectorXd>& v, int i) {
        const double d1 = v[0](i) - v[1](i), d2 = v[1](i) - v[2](i);
        if (d2 != 0.0) t.ratios.push_back(d1 / d2);
        return richardson3(v[0](i), v[1](i), v[2](i));
    };
    if (per[0].size() < 2 * need) throw MeshTooCoarse("not enough eigenvalues for the requested gaps");
    t.E0 = ext(per, 0);
    for (int n = 1; n <= N; ++n) {
        const auto& src = (n % 2 == 0) ? per : anti;
        // periodic: E0+, E2-, E2+, ...; antiperiodic: E1-, E1+, E3-, ...
        t.em[n] = ext(src, n - 1);
        t.ep[n] = ext(src, n);
    }
    return t;
}

std::vector<double> dirichlet_oracle(const PeriodicPotential& p, int N, int points) {
    if (points == 0) points = 40 * N;
    if (1.0 / points > 1.0 / (20.0 * N)) throw MeshTooCoarse("mesh does not resolve mu_" + std::to_string(N));
    std::vector<std::vector<double>> lv;
    for (int lev = 0; lev < 3; ++lev) {
        const int n = points << lev;
        const double h = 1.0 / n;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n - 1, n - 1);
        for (int j = 0; j < n - 1; ++j) {
            A(j, j) = 2.0 / (h * h) + p((j + 1) * h);
            if (j + 1 < n - 1) A(j, j + 1) = A(j + 1, j) = -1.0 / (h * h);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        lv.emplace_back(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    }
    std::vector<double> mu(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) mu[n] = richardson3(lv[0][n - 1], lv[1][n - 1], lv[2][n - 1]);
    return mu;
}

std::vector<double> box_eigs_oracle(const PeriodicPotential& p, const CompactPotential& q, double L, double lo,
                                    double hi, double h) {
    if (L < 10.0 * q.t) throw std::invalid_argument("box_eigs_oracle: L must be at least 10 t");
    if (h == 0.0) h = 1.0 / (20.0 * std::max(4.0, std::sqrt(std::max(hi, 1.0))));
    // a wall at L adds surface states; they move with the fractional part of L, bulk states do not
    std::vector<double> counts;
    const auto a = box_once(p, q, L, lo, hi, h, &counts);
    const auto b = box_once(p, q, L + 0.37, lo, hi, h, &counts);
    std::vector<double> out;
    int unmatched = 0;
    for (double x : a) {
        bool found = false;
        for (double y : b)
            if (std::abs(x - y) < 1e-6 * std::max(1.0, std::abs(x))) found = true;
        if (found) out.push_back(x);
        else ++unmatched;
    }
    if (unmatched > 2 || counts[0] > 40) throw WindowTouchesBand("window reaches into a band");
    return out;
}

namespace {

// three-point scheme psi_{j+1} = (2 + h^2 (V_j - E)) psi_j - psi_{j-1} on x_j = j h
struct HalflineMesh {
    int n = 0, L = 0;
    double h = 0.0;
    std::vector<double> V;  // V[j] for j = 1 .. (L + 1) n
};

HalflineMesh halfline_mesh(const PeriodicPotential& p, const CompactPotential& q, int n) {
    HalflineMesh m;
    m.n = n;
    m.h = 1.0 / n;
    // the exterior period must see no part of q, cell halves included
    m.L = int(std::floor(q.t)) + 1;
    const auto v = cell_average(p, q, m.h, (m.L + 1) * n);
    m.V.assign(v.size() + 1, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) m.V[j + 1] = v[j];
    return m;
}

// one period of the exterior, acting on (psi_j, psi_{j-1}) from j = L n + 1.
// Carried in difference form psi_j - psi_{j-1}: the plain recurrence with 2 + O(h^2) loses n^2 eps.
std::array<double, 4> halfline_period(const HalflineMesh& m, double E) {
    using ld = long double;
    const ld h2 = ld(m.h) * ld(m.h);
    ld col[2][2];
    for (int c = 0; c < 2; ++c) {
        ld a = (c == 0) ? 1.0L : 0.0L, b = (c == 0) ? 0.0L : 1.0L;
        ld d = a - b;
        for (int j = m.L * m.n + 1; j <= (m.L + 1) * m.n; ++j) {
            d += h2 * (ld(m.V[j]) - ld(E)) * a;
            b = a;
            a += d;
        }
        col[c][0] = a;
        col[c][1] = b;
    }
    return {double(col[0][0]), double(col[1][0]), double(col[0][1]), double(col[1][1])};  // P11 P12 P21 P22
}

std::pair<double, double> halfline_shoot(const HalflineMesh& m, double E) {
    using ld = long double;
    const ld h2 = ld(m.h) * ld(m.h);
    ld a = 1.0L, b = 0.0L, d = 1.0L;
    for (int j = 1; j <= m.L * m.n; ++j) {
        d += h2 * (ld(m.V[j]) - ld(E)) * a;
        b = a;
        a += d;
        const ld s = fabsl(a) + fabsl(b);
        if (s > 1e100L) {
            a /= s;
            b /= s;
            d /= s;
        }
    }
    return {double(a), double(b)};  // (psi_{Ln+1}, psi_{Ln})
}

struct HalflineLevel {
    double lo = -HUGE_VAL, hi = 0.0;
    std::vector<double> bound, antibound;
};

HalflineLevel halfline_level(const PeriodicPotential& p, const CompactPotential& q, int gap, int n) {
    const auto m = halfline_mesh(p, q, n);
    const double sigma = (gap % 2 == 0) ? 1.0 : -1.0;
    auto delta = [&](double E) {
        const auto P = halfline_period(m, E);
        return 0.5 * (P[0] + P[3]);
    };
    // discrete edges from the ring of one exterior period
    const double s2 = 1.0 / (m.h * m.h);
    auto ring = [&](double corner) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            A(j, j) = 2.0 * s2 + m.V[m.L * n + 1 + j];
            if (j + 1 < n) A(j, j + 1) = A(j + 1, j) = -s2;
        }
        A(0, n - 1) = A(n - 1, 0) = -corner * s2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    };
    HalflineLevel out;
    auto g = [&](double E) { return sigma * delta(E) - 1.0; };
    auto solve = [&](auto f, double a, double b) {
        std::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(52), it);
        return 0.5 * (r.first + r.second);
    };
    const auto per = ring(1.0);
    double scan_lo;
    if (gap == 0) {
        const double e0 = per(0);
        const double probe = e0 - 1e-6 * std::max(1.0, std::abs(e0));
        out.hi = (g(probe) > 0.0) ? solve(g, probe, e0 + 1e-6 * std::max(1.0, std::abs(e0)) + 1e-9) : e0;
        scan_lo = *std::min_element(m.V.begin() + 1, m.V.end()) - 1.0;
    } else {
        const auto src = (gap % 2 == 0) ? per : ring(-1.0);
        if (src.size() <= gap) throw MeshTooCoarse("mesh too coarse for the requested gap");
        const double em = src(gap - 1), ep = src(gap);
        // the eigenvalue solver is good to ~1e-13 ||A||; polish around the maximum of sigma Delta
        const double slack = 1e-12 * 4.0 * s2 + 1e-9;
        auto r = boost::math::tools::brent_find_minima([&](double E) { return -g(E); }, em - slack, ep + slack, 60);
        const double xm = r.first;
        if (!(-r.second > 0.0)) return {xm, xm, {}, {}};  // closed at this mesh
        double a = em - slack, b = ep + slack;
        while (g(a) > 0.0) a -= slack;
        while (g(b) > 0.0) b += slack;
        out.lo = solve(g, a, xm);
        out.hi = solve(g, xm, b);
        scan_lo = out.lo;
    }
    // mismatch against the two eigenvector normalizations; genuine roots zero both
    auto mismatch = [&](double E, bool decaying, int form) {
        const auto P = halfline_period(m, E);
        const double d = 0.5 * (P[0] + P[3]);
        const double root = std::sqrt(std::max(0.0, d * d - 1.0));
        // |lambda| < 1 picks the decaying Bloch solution
        const double lam = (decaying == (d > 0.0)) ? d - root : d + root;
        const auto [A, B] = halfline_shoot(m, E);
        return form == 0 ? A * (lam - P[0]) - B * P[1] : A * P[2] - B * (lam - P[3]);
    };
    const int M = 4000;
    std::vector<double> grid(M + 1);
    const double span = out.hi - scan_lo;
    for (int i = 0; i <= M; ++i) {
        const double u = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / (M + 1)));
        grid[i] = scan_lo + span * u;
    }
    for (bool decaying : {true, false}) {
        auto& dst = decaying ? out.bound : out.antibound;
        for (int form = 0; form < 2; ++form) {
            auto f = [&](double E) { return mismatch(E, decaying, form); };
            auto other = [&](double E) { return mismatch(E, decaying, 1 - form); };
            double fa = f(grid[0]);
            for (int i = 0; i < M; ++i) {
                const double fb = f(grid[i + 1]);
                if ((fa > 0.0) != (fb > 0.0)) {
                    const double r = solve(f, grid[i], grid[i + 1]);
                    const double ref = std::max(std::abs(other(grid[i])), std::abs(other(grid[i + 1])));
                    bool dup = false;
                    for (double e : dst)
                        if (std::abs(e - r) < 1e-9 * std::max(1.0, std::abs(r))) dup = true;
                    // a spurious root (normalization vector vanishing) leaves the other form at full size;
                    // in narrow gaps genuine roots only get down to ~1e-4 of it
                    if (!dup && std::abs(other(r)) <= 0.05 * ref) dst.push_back(r);
                }
                fa = fb;
            }
        }
        std::sort(dst.begin(), dst.end());
    }
    return out;
}

}  // namespace

HalflineGap halfline_gap_oracle(const PeriodicPotential& p, const CompactPotential& q, int gap, int per_unit) {
    if (gap < 0) throw std::invalid_argument("halfline_gap_oracle: gap index must be >= 0");
    if (per_unit == 0) {
        const double k = kPi * (gap + 1) + std::sqrt(std::abs(p.mean)) + 1.0;
        per_unit = 8 * int(std::ceil(20.0 * std::max(4.0, k) / 8.0));
    }
    std::vector<HalflineLevel> lv;
    for (int l = 0; l < 3; ++l) lv.push_back(halfline_level(p, q, gap, per_unit << l));
    HalflineGap out;
    out.lo = gap == 0 ? -HUGE_VAL : richardson3(lv[0].lo, lv[1].lo, lv[2].lo);
    out.hi = richardson3(lv[0].hi, lv[1].hi, lv[2].hi);
    for (bool bound : {true, false}) {
        auto pick = [&](const HalflineLevel& l) -> const std::vector<double>& { return bound ? l.bound : l.antibound; };
        if (pick(lv[0]).size() != pick(lv[1]).size() || pick(lv[1]).size() != pick(lv[2]).size()) {
            // a state within O(h^2) of an edge can cross it between meshes
            (bound ? out.bound_resolved : out.antibound_resolved) = false;
            continue;
        }
        for (std::size_t i = 0; i < pick(lv[0]).size(); ++i)
            out.states.push_back({richardson3(pick(lv[0])[i], pick(lv[1])[i], pick(lv[2])[i]), bound});
    }
    std::sort(out.states.begin(), out.states.end(),
              [](const HalflineState& a, const HalflineState& b) { return a.energy < b.energy; });
    return out;
}

cplx squarewell_jost(double c, double t, cplx z) {
    const cplx kappa = std::sqrt(z * z + c);
    const cplx I(0.0, 1.0);
    return std::exp(I * z * t) * (std::cos(kappa * t) - I * z * sinc_t(kappa, t));
}

std::vector<cplx> squarewell_resonances(double c, double t, double r) {
    const cplx I(0.0, 1.0);
    auto f = [&](cplx z) {
        const cplx kappa = std::sqrt(z * z + c);
        return std::cos(kappa * t) - I * z * sinc_t(kappa, t);
    };
    auto newton = [&](cplx z) {
        for (int it = 0; it < 100; ++it) {
            const double h = 1e-7 * std::max(1.0, std::abs(z));
            const cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
            const cplx step = f(z) / d;
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        return z;
    };
    std::vector<cplx> roots;
    auto add = [&](cplx z) {
        if (!(z.imag() < -1e-9) || std::abs(z.real()) < 1e-9 || std::abs(z) > r) return;
        if (z.real() < 0.0) z = -std::conj(z);
        if (std::abs(f(z)) > 1e-10 * std::max(1.0, std::abs(std::cos(std::sqrt(z * z + c) * t)))) return;
        for (const auto& w : roots)
            if (std::abs(w - z) < 1e-7) return;
        roots.push_back(z);
    };
    // e^{2 i kappa t} = -(kappa + z)/(kappa - z) gives one seed per branch m
    for (int m = 0; m < int(r * t / kPi) + 4; ++m) {
        cplx z = (kPi * (2 * m + 1)) / (2.0 * t) - 0.5 * I;
        for (int it = 0; it < 30; ++it) {
            const cplx kappa = std::sqrt(z * z + c);
            const cplx rhs = -(kappa + z) / (kappa - z);
            const cplx kap = (std::log(rhs) / (2.0 * I) + kPi * double(m)) / t;
            z = std::sqrt(kap * kap - c);
            if (z.imag() > 0) z = std::conj(z);
        }
        add(newton(z));
    }
    // low-lying zeros from a grid of starts
    const double Y = 3.0 / t * std::log(2.0 + r) + 1.0;
    for (double x = 0.25; x <= std::min(r, 6.0); x += 0.5)
        for (double y = -0.25; y >= -Y; y -= 0.5) add(newton(cplx(x, y)));
    const std::size_t half = roots.size();
    for (std::size_t i = 0; i < half; ++i) roots.push_back(-std::conj(roots[i]));
    // completeness: dense fixed-sample winding over both quarter boxes
    for (int side : {1, -1}) {
        const double x0 = side > 0 ? 1e-6 : -r, x1 = side > 0 ? r : -1e-6;
        const int per_unit = 400;
        std::vector<cplx> path;
        auto seg = [&](cplx a, cplx b) {
            const int n = std::max(16, int(std::abs(b - a) * per_unit));
            for (int i = 0; i < n; ++i) path.push_back(a + (b - a) * (double(i) / n));
        };
        seg({x0, -Y}, {x1, -Y});
        seg({x1, -Y}, {x1, -1e-6});
        seg({x1, -1e-6}, {x0, -1e-6});
        seg({x0, -1e-6}, {x0, -Y});
        double w = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) w += std::arg(f(path[(i + 1) % path.size()]) / f(path[i]));
        const int count = int(std::lround(w / (2.0 * kPi)));
        int inside = 0;
        for (const auto& z : roots)
            if (z.real() > x0 && z.real() < x1 && z.imag() > -Y) ++inside;
        // the disk |z| <= r is inside the box, so the box may hold a few more
        if (inside > count) throw Error("square-well root list inconsistent with the winding count");
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    return roots;
}

std::vector<double> squarewell_bound_gammas(double c, double t) {
    // kappa cot(kappa t) = -gamma, kappa^2 + gamma^2 = c
    std::vector<double> out;
    if (c <= 0.0) return out;
    auto g = [&](double kappa) {
        const double gamma = std::sqrt(std::max(0.0, c - kappa * kappa));
        return kappa * std::cos(kappa * t) + gamma * std::sin(kappa * t);
    };
    const double K = std::sqrt(c);
    const int S = 20000;
    for (int i = 0; i < S; ++i) {
        const double a = K * i / S, b = K * (i + 1) / S;
        const double ga = g(a), gb = g(b);
        if (i > 0 && ga * gb < 0) {
            std::uintmax_t it = 200;
            auto rr = boost::math::tools::toms748_solve(g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(52), it);
            const double kappa = 0.5 * (rr.first + rr.second);
            const double gamma = std::sqrt(c - kappa * kappa);
            if (gamma > 0.0) out.push_back(gamma);
        }
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double squarewell_norm(double c, double t, double gamma) {
    const double kappa = std::sqrt(c - gamma * gamma);
    const double A = std::exp(-gamma * t) / std::sin(kappa * t);
    return A * A * (t / 2.0 - std::sin(2.0 * kappa * t) / (4.0 * kappa)) + std::exp(-2.0 * gamma * t) / (2.0 * gamma);
}

}  // namespace hillres::oracle
