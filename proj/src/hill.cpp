#include "hillres/hill.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "hillres/errors.hpp"

namespace hillres {

namespace {

constexpr double kPi = std::numbers::pi;

double root_in(const auto& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw RootBracketFailure("no sign change in bracket");
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

Monodromy monodromy_from(const Columns& c, cplx z, double tau) {
    Monodromy m;
    m.theta1 = c[0];
    m.theta1p = c[1];
    m.phi1 = c[2];
    m.phi1p = c[3];
    m.delta = 0.5 * (m.phi1p + m.theta1);
    m.beta = 0.5 * (m.phi1p - m.theta1);
    m.z = z;
    m.tau = tau;
    return m;
}

Monodromy monodromy(const PeriodicPotential& p, cplx z, double tau, const OdeTol& tol) {
    return monodromy_from(propagate(p, nullptr, z * z, tau, 0.0, 1.0, identity_columns(), tol), z, tau);
}

Fundamental fundamental(const PeriodicPotential& p, cplx z, double x, double tau, const OdeTol& tol) {
    auto c = propagate(p, nullptr, z * z, tau, 0.0, x, identity_columns(), tol);
    return {c[0], c[2], c[1], c[3]};
}

std::vector<Fundamental> solve_on_grid(const PeriodicPotential& p, cplx z, const std::vector<double>& xs,
                                       const OdeTol& tol) {
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && (sorted.front() < 0.0 || sorted.back() > 1.0))
        throw std::invalid_argument("solve_on_grid: grid must lie in [0,1]");
    auto cols = propagate_through(p, nullptr, z * z, 0.0, 0.0, sorted, identity_columns(), tol);
    std::vector<Fundamental> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto j = std::size_t(std::lower_bound(sorted.begin(), sorted.end(), xs[i]) - sorted.begin());
        const auto& c = cols[j];
        out[i] = {c[0], c[2], c[1], c[3]};
    }
    return out;
}

double edge_function(const Monodromy& m, int sigma) {
    const double s = sigma;
    return ((m.theta1 - s) * (m.phi1p - s) - m.phi1 * m.theta1p).real();
}

double ground_energy(const PeriodicPotential& raw, const OdeTol& tol) {
    // Delta(lambda) - 1 is positive below E_0^+ and nonpositive at the mean
    auto f = [&](double lam) {
        auto m = monodromy(raw, std::sqrt(cplx(lam)), 0.0, tol);
        return edge_function(m, 1);
    };
    double hi = raw.mean;
    double fhi = f(hi);
    if (fhi >= 0.0 && std::abs(fhi) < 1e-14) return hi;
    double lo = raw.min_value() - 1.0;
    double flo = f(lo);
    // edge_function(., +1) = 2 - 2 Delta: negative below the spectrum
    int guard = 0;
    while (flo > 0.0 && guard++ < 60) {
        lo -= 2.0 * (hi - lo);
        flo = f(lo);
    }
    if (fhi < 0.0) {
        // mean lies below E_0^+ only if p is constant up to rounding
        return hi;
    }
    return root_in(f, lo, hi, flo, fhi);
}

PeriodicPotential gauge(const PeriodicPotential& raw, const OdeTol& tol) {
    const double e0 = ground_energy(raw, tol);
    PeriodicPotential g = raw;
    g.mean -= e0;
    g.gauge_shift += e0;
    return g;
}

int BandStructure::gap_of(double x, double slack) const {
    for (int n = 1; n <= N; ++n)
        if (x >= em[n] - slack && x <= ep[n] + slack) return n;
    return 0;
}

int BandStructure::band_of(double x) const {
    for (int n = 1; n <= N; ++n)
        if (x >= ep[n - 1] && x <= em[n]) return n;
    return 0;
}

BandStructure band_edges(const PeriodicPotential& p, int N, const OdeTol& tol, double closed_width) {
    if (N < 1) throw std::invalid_argument("band_edges: N must be >= 1");
    {
        auto m0 = monodromy(p, 0.0, 0.0, tol);
        if (std::abs(m0.delta.real() - 1.0) > 1e-8)
            throw std::invalid_argument("band_edges: potential is not gauged (E_0^+ != 0)");
    }
    BandStructure B;
    B.p = p;
    B.tol = tol;
    B.N = N;
    B.em.assign(N + 1, 0.0);
    B.ep.assign(N + 1, 0.0);
    B.mu.assign(N + 1, 0.0);
    B.open.assign(N + 1, false);

    const double h = kPi / 48.0;
    double x = 0.0;
    for (int n = 1; n <= N; ++n) {
        const int sigma = (n % 2 == 0) ? 1 : -1;
        auto g = [&](double z) { return edge_function(monodromy(p, z, 0.0, tol), sigma); };
        // g decreases through band n, is <= 0 on gap n and increases through band n+1
        double xa = x, ga = g(xa);
        double xprev = xa, gprev = ga;
        bool done = false;
        for (int it = 0; it < 100000 && !done; ++it) {
            const double xn = xprev + h;
            const double gn = g(xn);
            if (gn <= 0.0) {
                const double lo = root_in(g, xprev, xn, gprev, gn);
                double xb = xn, gb = gn;
                for (int k = 0; gb <= 0.0; ++k) {
                    if (k > 100000) throw RootBracketFailure("gap does not close");
                    xb += h;
                    gb = g(xb);
                }
                const double hi = root_in(g, xb - h, xb, g(xb - h), gb);
                B.em[n] = lo;
                B.ep[n] = hi;
                done = true;
            } else if (gn > gprev) {
                // passed the minimum between samples; Brent gets within ~1e-8 relative,
                // parabolic vertices through nearby samples resolve narrower gaps
                const double a = std::max(x, xprev - h), b = xn;
                auto r = boost::math::tools::brent_find_minima(g, a, b, 52);
                double xm = r.first, gm = r.second, curv = 0.0;
                for (double s : {1e-4, 1e-6}) {
                    const double gl = g(xm - s), g0 = g(xm), gr = g(xm + s);
                    const double c2 = (gr - 2.0 * g0 + gl) / (2.0 * s * s);
                    if (!(c2 > 0.0)) break;
                    const double slope = (gr - gl) / (2.0 * s);
                    const double xv = xm - slope / (2.0 * c2);
                    if (std::abs(xv - xm) > 2.0 * s + 1e-3) break;
                    xm = xv;
                    gm = g0 - slope * slope / (4.0 * c2);
                    curv = c2;
                }
                if (gm < 0.0 && curv > 0.0) {
                    // edges at xm -+ sqrt(-gm / curv) in the quadratic model
                    const double half = std::sqrt(-gm / curv);
                    double lo = xm - 3.0 * half, hi = xm + 3.0 * half;
                    double glo = g(lo), ghi = g(hi), gc = g(xm);
                    if (gc < 0.0 && glo > 0.0 && ghi > 0.0) {
                        B.em[n] = root_in(g, lo, xm, glo, gc);
                        B.ep[n] = root_in(g, xm, hi, gc, ghi);
                        done = true;
                        continue;
                    }
                    gm = gc;
                }
                if (gm < 0.0) {
                    B.em[n] = root_in(g, a, xm, g(a), gm);
                    B.ep[n] = root_in(g, xm, b, gm, g(b));
                } else {
                    B.em[n] = B.ep[n] = xm;
                }
                done = true;
            } else {
                xprev = xn;
                gprev = gn;
            }
        }
        if (!done) throw RootBracketFailure("band edge march did not terminate");
        if (B.ep[n] - B.em[n] < closed_width) {
            const double c = 0.5 * (B.em[n] + B.ep[n]);
            B.em[n] = B.ep[n] = c;
        }
        B.open[n] = B.ep[n] > B.em[n];
        x = B.ep[n];
    }

    // Dirichlet roots: phi(1,.) has sign (-1)^(m-1) inside band m
    auto phi1 = [&](double z) { return monodromy(p, z, 0.0, tol).phi1.real(); };
    std::vector<double> mid(N + 2);
    for (int m = 1; m <= N; ++m) mid[m] = 0.5 * (B.ep[m - 1] + B.em[m]);
    // beyond the last gap use the free spacing
    mid[N + 1] = B.ep[N] + 0.5 * kPi;
    std::vector<double> fmid(N + 2);
    for (int m = 1; m <= N + 1; ++m) {
        fmid[m] = phi1(mid[m]);
        const bool expect_pos = (m % 2 == 1);
        if ((fmid[m] > 0) != expect_pos)
            throw RootBracketFailure("band sign pattern broken near band " + std::to_string(m) +
                                     " (march step too coarse for this potential)");
    }
    for (int n = 1; n <= N; ++n) {
        double r = root_in(phi1, mid[n], mid[n + 1], fmid[n], fmid[n + 1]);
        const double slack = 1e-9 * (1.0 + B.width(n));
        if (B.open[n] && (r < B.em[n] - slack || r > B.ep[n] + slack))
            throw RootBracketFailure("Dirichlet root outside its gap closure at n=" + std::to_string(n));
        if (!B.open[n]) {
            // a closed gap is a double edge at the Dirichlet root
            B.em[n] = B.ep[n] = r;
        }
        B.mu[n] = std::clamp(r, B.em[n], B.ep[n]);
    }
    return B;
}

std::vector<double> dirichlet_mu(const PeriodicPotential& p, int N, const OdeTol& tol) {
    auto B = band_edges(p, N, tol);
    return std::vector<double>(B.mu.begin() + 1, B.mu.end());
}

}  // namespace hillres
